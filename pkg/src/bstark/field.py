"""Exact arithmetic in a real quadratic field F = Q(sqrt(d)) of class number one.

Elements are stored on the integral basis {1, w} where w = (1+sqrt(d))/2 for
d = 1 mod 4 and w = sqrt(d) otherwise.  Every ideal is principal and carries a
deterministic canonical generator so that ideals hash stably across runs.
All sign and comparison decisions are exact; no floating point anywhere.
"""

from __future__ import annotations

from fractions import Fraction
from math import isqrt

from .errors import UnsupportedFieldError
from .intmat import hnf, hnf_solve


def _sign(x):
    return (x > 0) - (x < 0)


def _gcd_int(a, b):
    while b:
        a, b = b, a % b
    return abs(a)


def _is_squarefree(n):
    if n % 4 == 0:
        return False
    f = 2
    while f * f <= n:
        if n % (f * f) == 0:
            return False
        f += 1
    return True


def is_rational_prime(n):
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


class QuadReal:
    """Exact real number A + B*sqrt(d) with rational A, B."""

    __slots__ = ("a", "b", "d")

    def __init__(self, a, b, d):
        self.a = Fraction(a)
        self.b = Fraction(b)
        self.d = d

    def _coerce(self, other):
        if isinstance(other, QuadReal):
            if other.d != self.d and other.b != 0 and self.b != 0:
                raise ValueError("mixed quadratic radicands")
            return QuadReal(other.a, other.b, self.d)
        return QuadReal(other, 0, self.d)

    def __add__(self, other):
        o = self._coerce(other)
        return QuadReal(self.a + o.a, self.b + o.b, self.d)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return QuadReal(self.a - o.a, self.b - o.b, self.d)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        return QuadReal(-self.a, -self.b, self.d)

    def __mul__(self, other):
        o = self._coerce(other)
        return QuadReal(self.a * o.a + self.b * o.b * self.d,
                        self.a * o.b + self.b * o.a, self.d)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        nrm = o.a * o.a - o.b * o.b * o.d
        if nrm == 0:
            raise ZeroDivisionError
        return self * QuadReal(o.a / nrm, -o.b / nrm, self.d)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def sign(self):
        a, b, d = self.a, self.b, self.d
        if b == 0:
            return _sign(a)
        if a == 0:
            return _sign(b)
        if a > 0 and b > 0:
            return 1
        if a < 0 and b < 0:
            return -1
        lhs, rhs = a * a, b * b * d
        if a > 0:  # b < 0
            return _sign(lhs - rhs)
        return _sign(rhs - lhs)

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __le__(self, other):
        return (self - other).sign() <= 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def __ge__(self, other):
        return (self - other).sign() >= 0

    def __eq__(self, other):
        try:
            o = self._coerce(other)
        except (ValueError, TypeError):
            return NotImplemented
        return (self - o).sign() == 0

    def __hash__(self):
        return hash((self.a, self.b, self.d))

    def is_rational(self):
        return self.b == 0

    def enclosure(self, bits):
        """Rational interval (lo, hi) containing the value, width ~ 2^-bits."""
        if self.b == 0:
            return self.a, self.a
        scale = 1 << bits
        s = isqrt(self.d * scale * scale)
        lo_rt = Fraction(s, scale)
        hi_rt = Fraction(s + 1, scale)
        if self.b > 0:
            return self.a + self.b * lo_rt, self.a + self.b * hi_rt
        return self.a + self.b * hi_rt, self.a + self.b * lo_rt

    def __float__(self):
        lo, hi = self.enclosure(64)
        return float((lo + hi) / 2)

    def __repr__(self):
        if self.b == 0:
            return "QuadReal(%s)" % self.a
        return "QuadReal(%s + %s*sqrt(%d))" % (self.a, self.b, self.d)


class FieldElement:
    """Element a + b*w of F, with exact rational coordinates."""

    __slots__ = ("ctx", "a", "b")

    def __init__(self, ctx, a, b):
        self.ctx = ctx
        self.a = Fraction(a)
        self.b = Fraction(b)

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if other.ctx.d != self.ctx.d:
                raise ValueError("elements of different fields")
            return other
        return FieldElement(self.ctx, other, 0)

    def __add__(self, other):
        o = self._coerce(other)
        return FieldElement(self.ctx, self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return FieldElement(self.ctx, self.a - o.a, self.b - o.b)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        return FieldElement(self.ctx, -self.a, -self.b)

    def __mul__(self, other):
        o = self._coerce(other)
        t, n0 = self.ctx.t, self.ctx.n0
        # (a1 + b1 w)(a2 + b2 w) with w^2 = t w + n0
        return FieldElement(self.ctx,
                            self.a * o.a + self.b * o.b * n0,
                            self.a * o.b + self.b * o.a + self.b * o.b * t)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        n = o.norm()
        if n == 0:
            raise ZeroDivisionError
        return self * o.conjugate() * (Fraction(1) / n)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, k):
        if k < 0:
            return (FieldElement(self.ctx, 1, 0) / self) ** (-k)
        out = FieldElement(self.ctx, 1, 0)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conjugate(self):
        # w -> t - w
        return FieldElement(self.ctx, self.a + self.b * self.ctx.t, -self.b)

    def norm(self):
        t, n0 = self.ctx.t, self.ctx.n0
        return self.a * self.a + t * self.a * self.b - n0 * self.b * self.b

    def trace(self):
        return 2 * self.a + self.ctx.t * self.b

    def embedding(self, i):
        """Exact image under the i-th real embedding (i = 0 sends sqrt(d) to +sqrt(d))."""
        d = self.ctx.d
        if self.ctx.t == 1:
            half = Fraction(1, 2)
            rt = half if i == 0 else -half
            return QuadReal(self.a + self.b * half, self.b * rt, d)
        rt = Fraction(1) if i == 0 else Fraction(-1)
        return QuadReal(self.a, self.b * rt, d)

    def embedding_vector(self):
        return (self.embedding(0), self.embedding(1))

    def sign_at(self, i):
        return self.embedding(i).sign()

    def signs(self):
        return (self.sign_at(0), self.sign_at(1))

    def is_totally_positive(self):
        return self.sign_at(0) > 0 and self.sign_at(1) > 0

    def is_integral(self):
        return self.a.denominator == 1 and self.b.denominator == 1

    def is_zero(self):
        return self.a == 0 and self.b == 0

    def is_rational(self):
        return self.b == 0

    def height(self):
        return max(abs(self.a.numerator), abs(self.b.numerator),
                   self.a.denominator, self.b.denominator)

    def coords(self):
        return (self.a, self.b)

    def __eq__(self, other):
        if not isinstance(other, FieldElement):
            try:
                other = self._coerce(other)
            except (ValueError, TypeError):
                return NotImplemented
        return self.ctx.d == other.ctx.d and self.a == other.a and self.b == other.b

    def __hash__(self):
        return hash((self.ctx.d, self.a, self.b))

    def __repr__(self):
        return "FieldElement(%s + %s*w; d=%d)" % (self.a, self.b, self.ctx.d)


class FieldContext:
    """Real quadratic field Q(sqrt(d)) with its ring of integers Z[w].

    Construction verifies d squarefree and class number one (by Minkowski-bound
    enumeration of small primes), and computes the fundamental unit.
    Instances are immutable and safe to share across workers.
    """

    def __init__(self, d):
        if d <= 1:
            raise UnsupportedFieldError("d must be an integer > 1")
        if not _is_squarefree(d):
            raise UnsupportedFieldError("d = %d is not squarefree" % d)
        self.d = d
        if d % 4 == 1:
            self.t, self.n0 = 1, (d - 1) // 4
            self.disc = d
        else:
            self.t, self.n0 = 0, d
            self.disc = 4 * d
        self.fundamental_unit = self._find_fundamental_unit()
        self._verify_class_number_one()

    # -- constructors --------------------------------------------------------

    def elem(self, a, b=0):
        return FieldElement(self, a, b)

    def one(self):
        return FieldElement(self, 1, 0)

    def zero(self):
        return FieldElement(self, 0, 0)

    def omega(self):
        return FieldElement(self, 0, 1)

    def sqrt_d(self):
        """sqrt(d) as a field element: 2w - 1 when d = 1 mod 4, else w."""
        if self.t == 1:
            return FieldElement(self, -1, 2)
        return FieldElement(self, 0, 1)

    # -- units and class number ----------------------------------------------

    def _solve_norm(self, y, value):
        """Integer x with N(x + y*w) = value, if any (both quadratic roots)."""
        disc = (self.t * y) ** 2 + 4 * (self.n0 * y * y + value)
        if disc < 0:
            return []
        s = isqrt(disc)
        if s * s != disc:
            return []
        out = []
        for sgn in (1, -1):
            num = -self.t * y + sgn * s
            if num % 2 == 0:
                out.append(num // 2)
        return sorted(set(out))

    def _find_fundamental_unit(self, bound=100000):
        for y in range(1, bound):
            candidates = []
            for val in (1, -1):
                for x in self._solve_norm(y, val):
                    u = FieldElement(self, x, y)
                    if u.embedding(0).sign() < 0:
                        u = -u
                    if (u.embedding(0) - 1).sign() < 0:
                        u = self.one() / u
                        if u.embedding(0).sign() < 0:
                            u = -u
                    candidates.append(u)
            if candidates:
                best = candidates[0]
                for u in candidates[1:]:
                    if u.embedding(0) < best.embedding(0):
                        best = u
                assert abs(best.norm()) == 1 and (best.embedding(0) - 1).sign() > 0
                return best
        raise UnsupportedFieldError("fundamental unit search bound exceeded for d=%d" % self.d)

    def _sqrt_mod(self, a, q):
        a %= q
        for r in range(q):
            if (r * r - a) % q == 0:
                return r
        return None

    def split_type(self, q):
        """'split', 'inert', or 'ramified' for a rational prime q."""
        if self.disc % q == 0:
            return "ramified"
        if q == 2:
            # d = 1 mod 4 here (otherwise 2 | disc); 2 splits iff d = 1 mod 8
            return "split" if self.d % 8 == 1 else "inert"
        return "split" if self._sqrt_mod(self.d, q) is not None else "inert"

    def element_of_norm(self, n):
        """Element with |norm| = n, or None.  The search window is complete:
        a principal ideal of norm n has a generator in it."""
        if n == 1:
            return self.one()
        for e in self._norm_solutions(n, one_sided=True):
            return e
        return None

    def elements_of_norm(self, n):
        return list(self._norm_solutions(n, one_sided=False))

    def _norm_solutions(self, n, one_sided):
        _, hi = self.fundamental_unit.embedding(0).enclosure(8)
        ybound = isqrt(int(n) * (int(hi) + 2) ** 2 // self.d) + 2
        ys = range(0, ybound + 1) if one_sided else range(-ybound, ybound + 1)
        for y in ys:
            for val in (n, -n):
                for x in self._solve_norm(y, val):
                    if x == 0 and y == 0:
                        continue
                    yield FieldElement(self, x, y)

    def _verify_class_number_one(self):
        mink = isqrt(self.disc) // 2 + 1
        for q in range(2, mink + 1):
            if not is_rational_prime(q):
                continue
            if self.split_type(q) == "inert":
                continue
            if self.element_of_norm(q) is None:
                raise UnsupportedFieldError(
                    "unsupported field: class number of Q(sqrt(%d)) exceeds 1 "
                    "(non-principal prime above %d)" % (self.d, q))

    def primes_above(self, q):
        """Prime ideals of O_F over the rational prime q, smallest first."""
        st = self.split_type(q)
        if st == "inert":
            return [IdealF(self, self.elem(q))]
        seen = set()
        out = []
        for e in self.elements_of_norm(q):
            ideal = IdealF(self, e)
            if ideal.key() not in seen:
                seen.add(ideal.key())
                out.append(ideal)
        out.sort(key=lambda i: (i.gen.a, i.gen.b))
        if st == "ramified":
            assert len(out) == 1
        else:
            assert len(out) == 2
        return out

    def __repr__(self):
        return "FieldContext(Q(sqrt(%d)))" % self.d

    def __eq__(self, other):
        return isinstance(other, FieldContext) and other.d == self.d

    def __hash__(self):
        return hash(("FieldContext", self.d))


def make_field(d):
    """Real quadratic field for squarefree d > 1.

    Raises UnsupportedFieldError for non-squarefree d or class number > 1.
    """
    if d != int(d):
        raise UnsupportedFieldError("d must be an integer")
    return FieldContext(int(d))


def canonical_generator(g):
    """Deterministic generator among the unit multiples of g.

    Walks toward minimal height along the fundamental-unit direction, then
    scans a small window; keeps sigma_1 > 0 and tie-breaks on coordinates.
    """
    ctx = g.ctx
    eps = ctx.fundamental_unit
    cur = g
    while True:
        down = cur * eps
        up = cur / eps
        if down.height() < cur.height():
            cur = down
        elif up.height() < cur.height():
            cur = up
        else:
            break
    window = []
    for k in range(-3, 4):
        cand = cur * eps ** k
        if cand.sign_at(0) < 0:
            cand = -cand
        window.append(cand)
    return min(window, key=lambda e: (e.height(), abs(e.b), abs(e.a), e.a, e.b))


class IdealF:
    """Fractional ideal of O_F, held by canonical generator plus HNF Z-basis.

    The lattice is (1/den) * rowspan(basis) in (1, w)-coordinates, with basis
    a 2x2 integer matrix in Hermite form.  Equality and hashing use the basis,
    so unit-multiple generators collapse.
    """

    __slots__ = ("ctx", "den", "basis", "gen", "_norm")

    def __init__(self, ctx, gen=None, _den=None, _basis=None):
        self.ctx = ctx
        if gen is not None:
            if not isinstance(gen, FieldElement):
                gen = ctx.elem(gen)
            if gen.is_zero():
                raise ValueError("zero ideal")
            gw = gen * ctx.omega()
            den = 1
            for c in (gen.a, gen.b, gw.a, gw.b):
                den = den * c.denominator // _gcd_int(den, c.denominator)
            rows = [
                [int(gen.a * den), int(gen.b * den)],
                [int(gw.a * den), int(gw.b * den)],
            ]
            self.den, self.basis = _normalize_den(den, hnf(rows))
            self.gen = canonical_generator(gen)
        else:
            self.den, self.basis = _normalize_den(_den, _basis)
            g = _find_lattice_generator(ctx, self.den, self.basis)
            self.gen = canonical_generator(g)
        self._norm = None

    # -- basic data -----------------------------------------------------------

    @property
    def norm(self):
        if self._norm is None:
            det = abs(self.basis[0][0] * self.basis[1][1] - self.basis[0][1] * self.basis[1][0])
            self._norm = Fraction(det, self.den * self.den)
        return self._norm

    def is_integral(self):
        return self.den == 1

    def is_unit_ideal(self):
        return self.den == 1 and self.norm == 1

    def basis_elements(self):
        return [FieldElement(self.ctx, Fraction(r[0], self.den), Fraction(r[1], self.den))
                for r in self.basis]

    def key(self):
        return (self.den, tuple(tuple(r) for r in self.basis))

    def __eq__(self, other):
        return (isinstance(other, IdealF) and self.ctx.d == other.ctx.d
                and self.key() == other.key())

    def __hash__(self):
        return hash((self.ctx.d, self.key()))

    def __repr__(self):
        return "IdealF(%s, norm=%s)" % (self.descriptor(), self.norm)

    def descriptor(self):
        """Stable text form for cache keys and reports."""
        g = self.gen
        if g.b == 0:
            return "(%s)" % (g.a,)
        if g.a == 0:
            return "(%s*w)" % (g.b,)
        return "(%s%s%s*w)" % (g.a, "+" if g.b > 0 else "-", abs(g.b))

    # -- arithmetic ------------------------------------------------------------

    def __mul__(self, other):
        if isinstance(other, IdealF):
            return IdealF(self.ctx, self.gen * other.gen)
        return IdealF(self.ctx, self.gen * other)

    def __pow__(self, k):
        return IdealF(self.ctx, self.gen ** k)

    def inverse(self):
        return IdealF(self.ctx, self.ctx.one() / self.gen)

    def __truediv__(self, other):
        return IdealF(self.ctx, self.gen / other.gen)

    def ideal_sum(self, other):
        """gcd of two fractional ideals (lattice sum)."""
        den = self.den * other.den // _gcd_int(self.den, other.den)
        rows = []
        for r in self.basis:
            f = den // self.den
            rows.append([r[0] * f, r[1] * f])
        for r in other.basis:
            f = den // other.den
            rows.append([r[0] * f, r[1] * f])
        return IdealF(self.ctx, _den=den, _basis=hnf(rows))

    def is_coprime(self, other):
        """Disjoint prime supports; for integral ideals this is sum = (1)."""
        if self.is_integral() and other.is_integral():
            return self.ideal_sum(other).is_unit_ideal()
        mine = {p.key() for p, _e in self.factor()}
        return all(p.key() not in mine for p, _e in other.factor())

    def contains(self, elem):
        xa = elem.a * self.den
        xb = elem.b * self.den
        if xa.denominator != 1 or xb.denominator != 1:
            return False
        return hnf_solve(self.basis, [int(xa), int(xb)]) is not None

    def contains_ideal(self, other):
        return all(self.contains(g) for g in other.basis_elements())

    def __contains__(self, elem):
        return self.contains(elem)

    def rational_content(self):
        """Smallest positive rational number in the ideal."""
        rows = [[r[1], r[0]] for r in self.basis]  # w-coordinate leading
        for row in hnf(rows):
            if row[0] == 0 and row[1] != 0:
                return Fraction(abs(row[1]), self.den)
        raise AssertionError("rank-2 ideal lattice without rational vector")

    def valuation(self, prime):
        """Exponent of the prime ideal `prime` in this ideal."""
        return element_valuation(self.gen, prime)

    def factor(self):
        """Prime factorization as a list of (prime ideal, exponent)."""
        out = []
        n = self.norm
        for q in sorted(set(_prime_factors(n.numerator)) | set(_prime_factors(n.denominator))):
            for pr in self.ctx.primes_above(q):
                v = self.valuation(pr)
                if v != 0:
                    out.append((pr, v))
        return out


def element_valuation(g, prime):
    """Valuation of a field element at a prime ideal."""
    if g.is_zero():
        raise ValueError("valuation of zero")
    den = g.a.denominator * g.b.denominator // _gcd_int(g.a.denominator, g.b.denominator)
    num = g * den
    return _integral_valuation(num, prime) - _integral_valuation(g.ctx.elem(den), prime)


def _integral_valuation(h, prime):
    assert h.is_integral()
    v = 0
    pi = prime.gen
    while True:
        q = h / pi
        if not q.is_integral():
            return v
        h = q
        v += 1


def _prime_factors(n):
    n = abs(int(n))
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


def _normalize_den(den, basis):
    g = den
    for r in basis:
        for x in r:
            g = _gcd_int(g, x)
    if g > 1:
        den //= g
        basis = [[x // g for x in r] for r in basis]
    return den, [list(r) for r in basis]


def _find_lattice_generator(ctx, den, basis):
    """A generator of the lattice (principal by the class number one invariant)."""
    det = abs(basis[0][0] * basis[1][1] - basis[0][1] * basis[1][0])
    for y_elem in _lattice_elements_of_norm(ctx, basis, det):
        return FieldElement(ctx, Fraction(y_elem.a, den), Fraction(y_elem.b, den))
    raise AssertionError("no single generator found; class number assumption violated?")


def _lattice_elements_of_norm(ctx, basis, n):
    _, hi = ctx.fundamental_unit.embedding(0).enclosure(8)
    ybound = isqrt(int(n) * (int(hi) + 2) ** 2 // ctx.d) + 2
    for y in range(-ybound, ybound + 1):
        for val in (n, -n):
            for x in ctx._solve_norm(y, val):
                if x == 0 and y == 0:
                    continue
                if hnf_solve(basis, [x, y]) is not None:
                    yield FieldElement(ctx, x, y)


def ideals_of_norm(ctx, n):
    """All integral ideals of norm exactly n (n >= 1), sorted deterministically."""
    if n == 1:
        return [IdealF(ctx, ctx.one())]
    seen = {}
    for e in ctx.elements_of_norm(n):
        ideal = IdealF(ctx, e)
        if ideal.is_integral() and ideal.norm == n:
            seen.setdefault(ideal.key(), ideal)
    return [seen[k] for k in sorted(seen)]


class ResidueRing:
    """O_F / n for an integral ideal n; canonical reps are reduced coordinate pairs."""

    def __init__(self, ctx, ideal):
        if not ideal.is_integral():
            raise ValueError("residue ring needs an integral ideal")
        self.ctx = ctx
        self.ideal = ideal
        b = ideal.basis
        assert b[1][0] == 0, "HNF expected"
        self.h11, self.h12, self.h22 = b[0][0], b[0][1], b[1][1]
        self.card = self.h11 * self.h22
        self.rational_modulus = int(ideal.rational_content())
        self._unit_cache = {}

    def reduce_pair(self, x, y):
        # subtract multiples of (h11, h12) to reduce x, then of (0, h22) for y
        q = x // self.h11
        x -= q * self.h11
        y -= q * self.h12
        y %= self.h22
        return (x, y)

    def reduce(self, elem):
        da, db = elem.a.denominator, elem.b.denominator
        den = da * db // _gcd_int(da, db)
        if den == 1:
            return self.reduce_pair(int(elem.a), int(elem.b))
        # valid only when den is invertible modulo the ideal
        inv = pow(den, -1, self.rational_modulus)
        return self.reduce_pair(int(elem.a * den) * inv, int(elem.b * den) * inv)

    def to_element(self, pair):
        return self.ctx.elem(pair[0], pair[1])

    def mul(self, p1, p2):
        e = self.to_element(p1) * self.to_element(p2)
        return self.reduce_pair(int(e.a), int(e.b))

    def add(self, p1, p2):
        return self.reduce_pair(p1[0] + p2[0], p1[1] + p2[1])

    def is_unit(self, pair):
        if pair not in self._unit_cache:
            e = self.to_element(pair)
            if e.is_zero():
                self._unit_cache[pair] = self.card == 1
            else:
                ew = e * self.ctx.omega()
                rows = [
                    [int(e.a), int(e.b)],
                    [int(ew.a), int(ew.b)],
                    [self.h11, self.h12],
                    [0, self.h22],
                ]
                h = hnf(rows)
                self._unit_cache[pair] = (h == [[1, 0], [0, 1]])
        return self._unit_cache[pair]

    def units(self):
        out = []
        for x in range(self.h11):
            for y in range(self.h22):
                p = self.reduce_pair(x, y)
                if self.is_unit(p):
                    out.append(p)
        return out

    def all_residues(self):
        return [self.reduce_pair(x, y) for x in range(self.h11) for y in range(self.h22)]


class ShintaniUnitGroup:
    """Generator of E(n): totally positive units congruent to 1 mod n."""

    def __init__(self, epsilon, index):
        self.epsilon = epsilon
        self.index = index

    def __repr__(self):
        return "ShintaniUnitGroup(eps=%r, index=%d)" % (self.epsilon, self.index)


def shintani_unit(ctx, conductor):
    """Minimal power of the fundamental unit that is totally positive and = 1 mod n."""
    if conductor.is_unit_ideal():
        raise ValueError("conductor must differ from (1)")
    ring = ResidueRing(ctx, conductor)
    eps = ctx.fundamental_unit
    one = ring.reduce(ctx.one())
    step = ring.reduce(eps)
    norm_sign = 1 if eps.norm() == 1 else -1
    cur = one
    acc_sign = 1
    limit = 4 * ring.card + 4
    for k in range(1, limit + 1):
        cur = ring.mul(cur, step)
        acc_sign *= norm_sign
        if cur == one and acc_sign == 1:
            u = eps ** k
            assert u.is_totally_positive() and conductor.contains(u - 1)
            return ShintaniUnitGroup(u, k)
    raise AssertionError("shintani unit not found within bound; ring enumeration bug?")
