"""Arithmetic in O_p, the unramified quadratic extension of Z_p (p inert),
to fixed absolute precision, plus multiplicative Riemann products and
recognition of small field elements from their residues.

Residues are coordinate pairs (x, y) for x + y*w mod p^m on the integral
basis; all operations are exact in the finite ring.  Units lose no precision
under multiplication, inversion, or exponentiation; division by p lowers the
absolute precision explicitly.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .errors import PrecisionError


class PadicRing:
    """O_F tensor Z_p at precision p^m, for an inert odd prime p."""

    def __init__(self, ctx, p, m):
        if p % 2 == 0:
            raise ValueError("p must be odd")
        self.ctx = ctx
        self.p = p
        self.m = m
        self.modulus = p ** m
        self.t = ctx.t % self.modulus
        self.n0 = ctx.n0 % self.modulus

    def element(self, x, y):
        return PadicElement(self, x % self.modulus, y % self.modulus)

    def one(self):
        return self.element(1, 0)

    def zero(self):
        return self.element(0, 0)

    def from_field_element(self, elem):
        """Reduce a field element with p-coprime denominators."""
        out = []
        for c in (elem.a, elem.b):
            c = Fraction(c)
            if math.gcd(c.denominator, self.p) != 1:
                raise ValueError("element has p in its denominator")
            out.append(c.numerator * pow(c.denominator, -1, self.modulus))
        return self.element(out[0], out[1])

    def at_precision(self, m):
        return PadicRing(self.ctx, self.p, m)

    def unit_group_exponent(self):
        return (self.p * self.p - 1) * self.p ** (self.m - 1)

    def unit_residues(self):
        """Canonical representatives x + y*w, 0 <= x, y < p^m, coprime to p."""
        out = []
        for x in range(self.modulus):
            for y in range(self.modulus):
                if x % self.p or y % self.p:
                    out.append((x, y))
        return out

    def __repr__(self):
        return "PadicRing(p=%d, m=%d, d=%d)" % (self.p, self.m, self.ctx.d)


class PadicElement:
    """Residue x + y*w mod p^m with explicit absolute precision m."""

    __slots__ = ("ring", "x", "y")

    def __init__(self, ring, x, y):
        self.ring = ring
        self.x = x % ring.modulus
        self.y = y % ring.modulus

    @property
    def precision(self):
        return self.ring.m

    def _coerce(self, other):
        if isinstance(other, PadicElement):
            if other.ring.p != self.ring.p:
                raise ValueError("mixed primes")
            if other.ring.m == self.ring.m:
                return self, other
            m = min(other.ring.m, self.ring.m)
            return self.at_precision(m), other.at_precision(m)
        return self, self.ring.element(other, 0)

    def at_precision(self, m):
        ring = self.ring.at_precision(m)
        return ring.element(self.x, self.y)

    def __add__(self, other):
        a, b = self._coerce(other)
        return a.ring.element(a.x + b.x, a.y + b.y)

    __radd__ = __add__

    def __sub__(self, other):
        a, b = self._coerce(other)
        return a.ring.element(a.x - b.x, a.y - b.y)

    def __neg__(self):
        return self.ring.element(-self.x, -self.y)

    def __mul__(self, other):
        a, b = self._coerce(other)
        mod = a.ring.modulus
        t, n0 = a.ring.t, a.ring.n0
        x = (a.x * b.x + n0 * a.y * b.y) % mod
        y = (a.x * b.y + a.y * b.x + t * a.y * b.y) % mod
        return a.ring.element(x, y)

    __rmul__ = __mul__

    def conjugate(self):
        return self.ring.element(self.x + self.ring.t * self.y, -self.y)

    def norm(self):
        """N(x + y*w) mod p^m, an integer residue."""
        mod = self.ring.modulus
        return (self.x * self.x + self.ring.t * self.x * self.y
                - self.ring.n0 * self.y * self.y) % mod

    def valuation(self):
        """min(v_p(x), v_p(y)); the ring is unramified so this is v_p."""
        if self.x == 0 and self.y == 0:
            return self.ring.m  # zero to working precision
        v = 0
        x, y = self.x, self.y
        p = self.ring.p
        while x % p == 0 and y % p == 0:
            x //= p
            y //= p
            v += 1
        return v

    def is_unit(self):
        return self.valuation() == 0

    def inverse(self):
        if not self.is_unit():
            raise ZeroDivisionError("inverse of a non-unit")
        n = self.norm()
        n_inv = pow(n, -1, self.ring.modulus)
        conj = self.conjugate()
        return self.ring.element(conj.x * n_inv, conj.y * n_inv)

    def __truediv__(self, other):
        a, b = self._coerce(other)
        return a * b.inverse()

    def __pow__(self, k):
        if k < 0:
            return self.inverse() ** (-k)
        out = self.ring.one()
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def divide_by_p_power(self, k):
        """Exact division by p^k; absolute precision drops by k."""
        pk = self.ring.p ** k
        if self.x % pk or self.y % pk:
            raise ValueError("not divisible by p^%d" % k)
        ring = self.ring.at_precision(self.ring.m - k)
        return ring.element(self.x // pk, self.y // pk)

    def principal_unit_part(self):
        """Image in 1 + pO_p: kills the Teichmueller torsion exactly.

        Raises the unit to the (p^2 - 1)-th power and takes the unique
        (p^2 - 1)-th root inside the pro-p group; both are exact ring
        operations, so no precision is lost.
        """
        if not self.is_unit():
            raise ValueError("principal part of a non-unit")
        p, m = self.ring.p, self.ring.m
        tor = p * p - 1
        if m == 1:
            return self.ring.one()
        powed = self ** tor
        inv = pow(tor, -1, p ** (m - 1))
        return powed ** inv

    def sqrt_one_unit(self):
        """The unique square root congruent to 1 mod p (element must be)."""
        p, m = self.ring.p, self.ring.m
        if (self - 1).valuation() < 1:
            raise ValueError("square root defined on 1-units only")
        if m == 1:
            return self.ring.one()
        inv2 = pow(2, -1, p ** (m - 1))
        root = self ** inv2
        assert (root * root - self).valuation() >= m
        return root

    def centered_lift(self):
        """Coordinates lifted to the balanced window (-p^m/2, p^m/2]."""
        half = self.ring.modulus // 2
        out = []
        for c in (self.x, self.y):
            out.append(c - self.ring.modulus if c > half else c)
        return tuple(out)

    def key(self):
        return (self.x, self.y, self.ring.m)

    def __eq__(self, other):
        if not isinstance(other, PadicElement):
            other = self.ring.element(other, 0)
        a, b = self._coerce(other)
        return a.x == b.x and a.y == b.y

    def __repr__(self):
        return "PadicElement(%d + %d*w mod %d^%d)" % (
            self.x, self.y, self.ring.p, self.ring.m)


class PadicUnitValue:
    """p^e times a unit of O_p, known to the unit's precision."""

    __slots__ = ("exponent", "unit")

    def __init__(self, exponent, unit):
        if not unit.is_unit():
            raise ValueError("unit part must have valuation zero")
        self.exponent = exponent
        self.unit = unit

    @property
    def precision(self):
        return self.unit.precision

    def __mul__(self, other):
        return PadicUnitValue(self.exponent + other.exponent, self.unit * other.unit)

    def __truediv__(self, other):
        return PadicUnitValue(self.exponent - other.exponent, self.unit / other.unit)

    def inverse(self):
        return PadicUnitValue(-self.exponent, self.unit.inverse())

    def __pow__(self, k):
        return PadicUnitValue(self.exponent * k, self.unit ** k)

    def __eq__(self, other):
        return (self.exponent == other.exponent
                and self.unit == other.unit)

    def hat(self):
        """Image in F_p^* tensor Z_p: Teichmueller torsion dies."""
        return HatUnitValue(Fraction(self.exponent), self.unit.principal_unit_part())

    def __repr__(self):
        return "PadicUnitValue(p^%s * %r)" % (self.exponent, self.unit)


class HatUnitValue:
    """Element of F_p^* tensor-hat Z_p: p-power exponent and a 1-unit part.

    The exponent is a p-adic integer; square roots halve it (2 is invertible
    in Z_p), and the principal part has a unique square root in 1 + pO_p.
    """

    __slots__ = ("exponent", "principal")

    def __init__(self, exponent, principal):
        self.exponent = Fraction(exponent)
        if (principal - 1).valuation() < 1:
            raise ValueError("principal part must be a 1-unit")
        self.principal = principal

    @property
    def precision(self):
        return self.principal.precision

    def __mul__(self, other):
        return HatUnitValue(self.exponent + other.exponent,
                            self.principal * other.principal)

    def __truediv__(self, other):
        return HatUnitValue(self.exponent - other.exponent,
                            self.principal / other.principal)

    def inverse(self):
        return HatUnitValue(-self.exponent, self.principal.inverse())

    def sqrt(self):
        return HatUnitValue(self.exponent / 2, self.principal.sqrt_one_unit())

    def is_one(self):
        p = self.principal.ring.p
        m = self.principal.ring.m
        # exponent must vanish as a p-adic integer at working precision
        num, den = self.exponent.numerator, self.exponent.denominator
        if math.gcd(den, p) != 1:
            return False
        return num % (p ** m) == 0 and self.principal == 1

    def __eq__(self, other):
        return (self / other).is_one()

    def __repr__(self):
        return "HatUnitValue(p^%s * %r)" % (self.exponent, self.principal)


def riemann_product(ring, mu, level):
    """prod over unit cosets a of a^mu(a + p^level O_p), in O_p/p^level.

    `mu` is a callable on canonical representatives (x, y); values must be
    integers.  The result is a unit known mod p^level.
    """
    if level != ring.m:
        ring = ring.at_precision(level)
    out = ring.one()
    for x, y in ring.unit_residues():
        e = mu((x, y))
        if e == int(e):
            e = int(e)
        else:
            raise ValueError("measure returned a non-integer")
        if e:
            out = out * (ring.element(x, y) ** e)
    return out


def riemann_product_from_table(ring, exponents, level):
    """Vectorized Riemann product from a full residue-indexed exponent table.

    `exponents` is indexable by x * p^level + y (numpy array or list) covering
    all residues; non-unit cosets are skipped.  Deterministic tree reduction.
    """
    if level != ring.m:
        ring = ring.at_precision(level)
    big_p = ring.modulus
    p = ring.p
    mod = big_p
    xs, ys = np.meshgrid(np.arange(big_p, dtype=np.int64),
                         np.arange(big_p, dtype=np.int64), indexing="ij")
    xs = xs.reshape(-1)
    ys = ys.reshape(-1)
    unit_mask = ((xs % p) != 0) | ((ys % p) != 0)
    xs, ys = xs[unit_mask], ys[unit_mask]
    exps = np.asarray(exponents, dtype=np.int64)[unit_mask.nonzero()[0]]
    order = ring.unit_group_exponent()
    exps = np.mod(exps, order)
    # square-and-multiply over exponent bits, vectorized on coordinate pairs
    t, n0 = ring.t, ring.n0

    def ring_mul(ax, ay, bx, by):
        x = (ax * bx + n0 * ay * by) % mod
        y = (ax * by + ay * bx + t * ay * by) % mod
        return x, y

    acc_x = np.ones_like(xs)
    acc_y = np.zeros_like(ys)
    base_x, base_y = xs.copy(), ys.copy()
    emax = int(exps.max(initial=0))
    e = exps.copy()
    while emax > 0:
        sel = (e & 1).astype(bool)
        if sel.any():
            nx, ny = ring_mul(acc_x[sel], acc_y[sel], base_x[sel], base_y[sel])
            acc_x[sel], acc_y[sel] = nx, ny
        base_x, base_y = ring_mul(base_x, base_y, base_x, base_y)
        e >>= 1
        emax >>= 1
    # tree reduction of the per-coset factors
    while acc_x.size > 1:
        if acc_x.size % 2:
            acc_x = np.concatenate([acc_x, np.ones(1, dtype=np.int64)])
            acc_y = np.concatenate([acc_y, np.zeros(1, dtype=np.int64)])
        half = acc_x.size // 2
        acc_x, acc_y = ring_mul(acc_x[:half], acc_y[:half],
                                acc_x[half:], acc_y[half:])
    return ring.element(int(acc_x[0]), int(acc_y[0]))


def recognize(x, height_bound):
    """Field element a + b*w with balanced lifts |a|, |b| <= height_bound whose
    image mod p^m is x, or None (with a reason) when no unambiguous lift exists.

    Returns (element, reason): element is None on failure.
    """
    mod = x.ring.modulus
    if 2 * height_bound >= mod:
        return None, "ambiguous: window 2B = %d reaches p^m = %d" % (
            2 * height_bound, mod)
    a, b = x.centered_lift()
    if abs(a) > height_bound or abs(b) > height_bound:
        return None, "no lift within height bound %d (saw %d, %d)" % (
            height_bound, a, b)
    return x.ring.ctx.elem(a, b), "ok"


def recognize_escalating(x, start_bound=4):
    """Recognition with geometrically escalating bounds; first bound whose
    result stays stable at the doubled bound wins.

    Bounds run up to the uniqueness limit (2B < p^m), where the balanced lift
    is still unambiguous.  Beyond the square-root information bound a lone
    residue cannot rule out coincidental small lifts, so callers confirm
    reconstructions at a second precision (the stability oracle); the
    returned element is exact whenever any valid lift exists.
    Raises PrecisionError when every bound fails.
    """
    hard_cap = max((x.ring.modulus - 1) // 2, 1)
    bound = max(min(start_bound, hard_cap), 1)
    reasons = []
    while True:
        b = min(bound, hard_cap)
        elem, reason = recognize(x, b)
        if elem is not None:
            elem2, _r2 = recognize(x, min(2 * b, hard_cap))
            if elem2 is not None and elem2 == elem:
                return elem
            reasons.append("unstable at bound %d" % b)
        else:
            reasons.append(reason)
        if b == hard_cap:
            break
        bound *= 2
    raise PrecisionError("recognition failed up to bound %d (modulus %d): %s"
                         % (hard_cap, x.ring.modulus, "; ".join(reasons[-2:])))
