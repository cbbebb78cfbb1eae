"""Exact arithmetic in cyclotomic fields Q(zeta_n) as Q[x]/Phi_n(x).

Coefficients are Fractions; n stays small (the exponent of a narrow ray class
group), so dense polynomial arithmetic is plenty.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n):
    """Coefficients of Phi_n, ascending degree, as a tuple of ints."""
    if n == 1:
        return (-1, 1)
    # x^n - 1 divided by the product of Phi_d over proper divisors d | n
    poly = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            poly = _poly_divide_exact(poly, cyclotomic_polynomial(d))
    return tuple(poly)


def _poly_divide_exact(num, den):
    num = [Fraction(c) for c in num]
    den = list(den)
    out = [Fraction(0)] * (len(num) - len(den) + 1)
    while len(num) >= len(den) and any(num):
        shift = len(num) - len(den)
        lead = num[-1] / den[-1]
        out[shift] = lead
        for i, c in enumerate(den):
            num[shift + i] -= lead * c
        while num and num[-1] == 0:
            num.pop()
    if any(num):
        raise ArithmeticError("non-exact polynomial division")
    assert all(c.denominator == 1 for c in out)
    return [int(c) for c in out]


class Cyclotomic:
    """Element of Q(zeta_n), stored by coefficients on 1, x, ..., x^(phi(n)-1)."""

    __slots__ = ("n", "coeffs")

    def __init__(self, n, coeffs=None):
        self.n = n
        deg = len(cyclotomic_polynomial(n)) - 1
        if coeffs is None:
            coeffs = [Fraction(0)] * deg
        self.coeffs = [Fraction(c) for c in coeffs]
        if len(self.coeffs) != deg:
            raise ValueError("coefficient vector has wrong length")

    @classmethod
    def rational(cls, n, value):
        deg = len(cyclotomic_polynomial(n)) - 1
        coeffs = [Fraction(value)] + [Fraction(0)] * (deg - 1)
        return cls(n, coeffs)

    @classmethod
    def zeta_power(cls, n, k):
        """zeta_n^k as an element of Q(zeta_n)."""
        k %= n
        deg = len(cyclotomic_polynomial(n)) - 1
        raw = [Fraction(0)] * (k + 1)
        raw[k] = Fraction(1)
        return cls(n, _reduce_mod_phi(raw, n))

    def __add__(self, other):
        other = self._coerce(other)
        return Cyclotomic(self.n, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other):
        other = self._coerce(other)
        return Cyclotomic(self.n, [a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __neg__(self):
        return Cyclotomic(self.n, [-a for a in self.coeffs])

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Cyclotomic(self.n, [a * other for a in self.coeffs])
        if other.n != self.n:
            raise ValueError("mixed cyclotomic orders")
        raw = [Fraction(0)] * (2 * len(self.coeffs))
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b:
                        raw[i + j] += a * b
        return Cyclotomic(self.n, _reduce_mod_phi(raw, self.n))

    __rmul__ = __mul__
    __radd__ = __add__

    def _coerce(self, other):
        if isinstance(other, Cyclotomic):
            if other.n != self.n:
                raise ValueError("mixed cyclotomic orders")
            return other
        return Cyclotomic.rational(self.n, other)

    def __eq__(self, other):
        other = self._coerce(other)
        return self.coeffs == other.coeffs

    def is_rational(self):
        return all(c == 0 for c in self.coeffs[1:])

    def rational_value(self):
        if not self.is_rational():
            raise ArithmeticError("value is not rational: %s" % (self.coeffs,))
        return self.coeffs[0]

    def is_zero(self):
        return all(c == 0 for c in self.coeffs)

    def __repr__(self):
        return "Cyclotomic(n=%d, %s)" % (self.n, self.coeffs)


@lru_cache(maxsize=None)
def _power_reduction_table(n):
    """x^k mod Phi_n for k up to 2*deg, as tuples of Fractions."""
    phi = cyclotomic_polynomial(n)
    deg = len(phi) - 1
    table = []
    cur = [Fraction(0)] * deg
    # x^k for k < deg is itself
    for k in range(deg):
        row = [Fraction(0)] * deg
        row[k] = Fraction(1)
        table.append(tuple(row))
    prev = list(table[-1]) if deg else [Fraction(1)]
    for _k in range(deg, 2 * deg + 1):
        # multiply prev by x, reduce by phi
        cur = [Fraction(0)] + list(prev)
        if len(cur) > deg:
            lead = cur.pop()
            if lead:
                for i in range(deg):
                    cur[i] -= lead * phi[i] / phi[deg]
        table.append(tuple(cur))
        prev = cur
    return table


def _reduce_mod_phi(raw, n):
    table = _power_reduction_table(n)
    deg = len(cyclotomic_polynomial(n)) - 1
    out = [Fraction(0)] * deg
    for k, c in enumerate(raw):
        if c:
            if k >= len(table):
                # reduce recursively: x^k = x^(k-deg) * x^deg
                tail = _reduce_mod_phi([Fraction(0)] * (k - deg) + [c], n)
                red = [Fraction(0)] * (2 * deg)
                for i, a in enumerate(tail):
                    if a:
                        for j, b in enumerate(table[deg]):
                            red[i + j] += a * b
                for i, a in enumerate(_reduce_mod_phi(red, n)):
                    out[i] += a
            else:
                for i, b in enumerate(table[k]):
                    out[i] += c * b
    return out
