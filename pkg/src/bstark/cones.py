"""Simplicial cones, Colmez closures, and signed fundamental domains.

Degree-generic over any exact ordered scalar type supporting field arithmetic
and an exact `sign` (Fraction, or QuadReal for quadratic embeddings).  The
pipeline uses n = 2; the constructions are written for general n and
exercised at n = 1, 2, 3 in the tests.

The orientation sign of det(log eps_ij) is certified with adaptive rational
log enclosures; no value sneaks in through floating point.
"""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import combinations, permutations

from .errors import InvariantError
from .field import QuadReal


def scalar_sign(s):
    if isinstance(s, QuadReal):
        return s.sign()
    s = Fraction(s)
    return (s > 0) - (s < 0)


def scalar_enclosure(s, bits):
    if isinstance(s, QuadReal):
        return s.enclosure(bits)
    s = Fraction(s)
    return (s, s)


class ExactVector:
    """Vector with exact ordered-field coordinates; componentwise action.

    `tag` optionally carries the field element whose embeddings the
    coordinates are; products of tagged vectors keep the tags multiplied, so
    domain generators stay usable for exact lattice work downstream.
    """

    __slots__ = ("coords", "tag")

    def __init__(self, coords, tag=None):
        self.coords = tuple(coords)
        self.tag = tag

    def __len__(self):
        return len(self.coords)

    def __getitem__(self, i):
        return self.coords[i]

    def __iter__(self):
        return iter(self.coords)

    def act(self, other):
        """Componentwise product (the totally positive unit action)."""
        tag = self.tag * other.tag if self.tag is not None and other.tag is not None else None
        return ExactVector([a * b for a, b in zip(self.coords, other.coords)], tag)

    def all_positive(self):
        return all(scalar_sign(c) > 0 for c in self.coords)

    def __eq__(self, other):
        return isinstance(other, ExactVector) and all(
            scalar_sign(a - b) == 0 for a, b in zip(self.coords, other.coords))

    def __repr__(self):
        return "ExactVector(%s)" % (self.coords,)


def embed_element(elem):
    """Tagged embedding vector of a field element."""
    return ExactVector(elem.embedding_vector(), tag=elem)


def _solve_exact(columns, rhs):
    """Solve sum_j t_j * columns[j] = rhs exactly; None if inconsistent.

    columns: r vectors of length n (r <= n).  Returns list of r scalars.
    """
    n = len(rhs)
    r = len(columns)
    aug = [[columns[j][i] for j in range(r)] + [rhs[i]] for i in range(n)]
    pivots = []
    row = 0
    for col in range(r):
        piv = next((k for k in range(row, n) if scalar_sign(aug[k][col]) != 0), None)
        if piv is None:
            continue
        aug[row], aug[piv] = aug[piv], aug[row]
        inv_p = aug[row][col]
        aug[row] = [x / inv_p for x in aug[row]]
        for k in range(n):
            if k != row and scalar_sign(aug[k][col]) != 0:
                f = aug[k][col]
                aug[k] = [x - f * y for x, y in zip(aug[k], aug[row])]
        pivots.append(col)
        row += 1
    # consistency of the remaining rows
    for k in range(row, n):
        if scalar_sign(aug[k][r]) != 0:
            return None
    if len(pivots) < r:
        return None  # dependent generators: caller treats as error
    sol = [None] * r
    for i, col in enumerate(pivots):
        sol[col] = aug[i][r]
    return sol


def exact_det(matrix):
    """Exact determinant over the generic scalar type (rows of equal length)."""
    n = len(matrix)
    m = [list(r) for r in matrix]
    det = None
    sign_flips = 1
    for c in range(n):
        piv = next((k for k in range(c, n) if scalar_sign(m[k][c]) != 0), None)
        if piv is None:
            return 0 * m[0][0] if not isinstance(m[0][0], QuadReal) else QuadReal(0, 0, m[0][0].d)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            sign_flips = -sign_flips
        det = m[c][c] if det is None else det * m[c][c]
        for k in range(c + 1, n):
            if scalar_sign(m[k][c]) != 0:
                f = m[k][c] / m[c][c]
                m[k] = [x - f * y for x, y in zip(m[k], m[c])]
    return det * sign_flips


class SimplicialCone:
    """Open cone spanned by r <= n linearly independent totally positive vectors."""

    def __init__(self, generators):
        self.generators = [g if isinstance(g, ExactVector) else ExactVector(g)
                           for g in generators]
        if not self.generators:
            raise ValueError("cone needs at least one generator")
        self.n = len(self.generators[0])
        for g in self.generators:
            if not g.all_positive():
                raise ValueError("cone generators must be totally positive")
        if len(self.generators) > self.n:
            raise ValueError("too many generators")
        if self._rank() != len(self.generators):
            raise ValueError("singular generator matrix")

    def _rank(self):
        m = [list(g) for g in self.generators]
        rank = 0
        cols_n = self.n
        row = 0
        for col in range(cols_n):
            piv = next((k for k in range(row, len(m)) if scalar_sign(m[k][col]) != 0), None)
            if piv is None:
                continue
            m[row], m[piv] = m[piv], m[row]
            for k in range(len(m)):
                if k != row and scalar_sign(m[k][col]) != 0:
                    f = m[k][col] / m[row][col]
                    m[k] = [x - f * y for x, y in zip(m[k], m[row])]
            row += 1
        return row

    @property
    def rank(self):
        return len(self.generators)

    def contains(self, point):
        """Exact membership of a point in the open cone."""
        if not isinstance(point, ExactVector):
            point = ExactVector(point)
        sol = _solve_exact(self.generators, list(point))
        if sol is None:
            return False
        return all(scalar_sign(t) > 0 for t in sol)

    def __repr__(self):
        return "SimplicialCone(rank=%d, n=%d)" % (self.rank, self.n)


class ColmezClosure:
    """Full cone plus the boundary faces selected by the positivity rule."""

    def __init__(self, generators, positive_subsets, q_coords, degenerate_axes):
        self.generators = generators
        self.positive_subsets = positive_subsets
        self.q_coords = q_coords
        self.degenerate_axes = degenerate_axes  # indices with q_i = 0, flagged

    def faces(self):
        return [(j, SimplicialCone([self.generators[i] for i in j]))
                for j in self.positive_subsets]

    def contains(self, point):
        return any(cone.contains(point) for _j, cone in self.faces())

    def indicator(self, point):
        return 1 if self.contains(point) else 0

    def __repr__(self):
        return "ColmezClosure(n=%d, positive=%s)" % (
            len(self.generators), self.positive_subsets)


def colmez_closure(generators):
    """Closure of the full-dimensional cone on `generators` by positive faces.

    Solves (0, ..., 0, 1) = sum q_i v_i exactly; a nonempty index set J is kept
    iff q_i > 0 for every i outside J.  Coordinates with q_i = 0 are flagged
    (the strict inequality excludes them).
    """
    gens = [g if isinstance(g, ExactVector) else ExactVector(g) for g in generators]
    n = len(gens[0])
    if len(gens) != n:
        raise ValueError("Colmez closure needs n generators in dimension n")
    for g in gens:
        if not g.all_positive():
            raise ValueError("generators must be totally positive")
    target = [g[0] * 0 for g in gens]
    target[-1] = target[-1] + 1
    q = _solve_exact(gens, target)
    if q is None:
        raise ValueError("singular generator matrix")
    signs = [scalar_sign(x) for x in q]
    degenerate = tuple(i for i, s in enumerate(signs) if s == 0)
    subsets = []
    for size in range(1, n + 1):
        for j in combinations(range(n), size):
            outside = [i for i in range(n) if i not in j]
            if all(signs[i] > 0 for i in outside):
                subsets.append(j)
    return ColmezClosure(gens, subsets, q, degenerate)


class SignedDomain:
    """Weighted Colmez closures forming a signed fundamental domain."""

    def __init__(self, terms, units, orientation, descriptor):
        self.terms = [(w, c) for (w, c) in terms if w != 0]
        self.units = units
        self.orientation = orientation
        self.descriptor = descriptor

    def weighted_indicator(self, point):
        return sum(w * c.indicator(point) for w, c in self.terms)

    def __repr__(self):
        return "SignedDomain(%s; %d terms)" % (self.descriptor, len(self.terms))


def log_enclosure(value_lo, value_hi, bits):
    """Rational enclosure of ln over a positive rational interval."""
    lo = _ln_lo_hi(value_lo, bits)[0]
    hi = _ln_lo_hi(value_hi, bits)[1]
    return lo, hi


_LN2_CACHE = {}


def _ln2(bits):
    if bits not in _LN2_CACHE:
        _LN2_CACHE[bits] = _atanh_series(Fraction(1, 3), bits)
    return _LN2_CACHE[bits]


def _atanh_series(z, bits):
    """(lo, hi) for 2*atanh(z), z rational in [0, 1)."""
    tol = Fraction(1, 1 << bits)
    term = z
    total = Fraction(0)
    j = 0
    z2 = z * z
    while True:
        total += term / (2 * j + 1)
        term *= z2
        j += 1
        tail = term / ((2 * j + 1) * (1 - z2))
        if tail < tol / 2:
            return 2 * total, 2 * (total + tail)


def _ln_lo_hi(x, bits):
    x = Fraction(x)
    if x <= 0:
        raise ValueError("log of nonpositive value")
    k = 0
    while x >= 2:
        x /= 2
        k += 1
    while x < 1:
        x *= 2
        k -= 1
    z = (x - 1) / (x + 1)
    m_lo, m_hi = _atanh_series(z, bits)
    l2_lo, l2_hi = _ln2(bits)
    if k >= 0:
        return m_lo + k * l2_lo, m_hi + k * l2_hi
    return m_lo + k * l2_hi, m_hi + k * l2_lo


class _Interval:
    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi):
        self.lo, self.hi = lo, hi

    def __add__(self, o):
        return _Interval(self.lo + o.lo, self.hi + o.hi)

    def __sub__(self, o):
        return _Interval(self.lo - o.hi, self.hi - o.lo)

    def __mul__(self, o):
        vals = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return _Interval(min(vals), max(vals))

    def sign(self):
        if self.lo > 0:
            return 1
        if self.hi < 0:
            return -1
        return 0


def _interval_det(m):
    n = len(m)
    if n == 1:
        return m[0][0]
    total = _Interval(Fraction(0), Fraction(0))
    for j in range(n):
        minor = [[m[i][k] for k in range(n) if k != j] for i in range(1, n)]
        term = m[0][j] * _interval_det(minor)
        if j % 2:
            term = _Interval(-term.hi, -term.lo)
        total = total + term
    return total


def certified_log_det_sign(units, max_bits=4096):
    """Sign of det(log eps_ij) for i, j over the first n-1 coordinates.

    Refines rational log enclosures until the interval determinant has a
    definite sign; the determinant is nonzero for independent units.
    """
    r = len(units)
    if r == 0:
        return 1
    bits = 32
    while bits <= max_bits:
        m = []
        enclosures_ok = True
        for u in units:
            row = []
            for j in range(r):
                v_lo, v_hi = scalar_enclosure(u[j], bits)
                if v_lo <= 0:
                    enclosures_ok = False  # refine until the enclosure clears 0
                    break
                row.append(_Interval(*log_enclosure(v_lo, v_hi, bits)))
            if not enclosures_ok:
                break
            m.append(row)
        if enclosures_ok:
            s = _interval_det(m).sign()
            if s != 0:
                return s
        bits *= 2
    raise InvariantError("log determinant sign could not be certified "
                         "(units dependent or precision cap hit)")


def signed_fundamental_domain(units, n=None, descriptor=""):
    """Signed fundamental domain for the group generated by n-1 totally
    positive units, built from permutation cones with orientation weights.

    `units` is a list of n-1 ExactVectors (coordinate images of the units).
    """
    units = [u if isinstance(u, ExactVector) else ExactVector(u) for u in units]
    if n is None:
        n = len(units[0]) if units else 1
    if len(units) != n - 1:
        raise ValueError("need exactly n-1 units")
    for u in units:
        if not u.all_positive():
            raise ValueError("units must be totally positive")
    one = _ones_like(units, n)
    if n == 1:
        closure = colmez_closure([one])
        return SignedDomain([(1, closure)], units, 1, descriptor or "dim1")

    w_eps = certified_log_det_sign(units)
    terms = []
    for sigma in permutations(range(n - 1)):
        # cumulative products: v_1 = (1,...,1), v_i = eps_{sigma(1)}...eps_{sigma(i-1)}
        vs = [one]
        for i in range(1, n):
            vs.append(vs[-1].act(units[sigma[i - 1]]))
        det = exact_det([list(v) for v in vs])
        det_sign = scalar_sign(det)
        sign_sigma = _permutation_sign(sigma)
        w = ((-1) ** (n - 1)) * w_eps * sign_sigma * det_sign
        if w == 0:
            continue
        terms.append((w, colmez_closure(vs)))
    return SignedDomain(terms, units, w_eps, descriptor or ("dim%d" % n))


def _ones_like(units, n):
    tag = None
    if units and units[0].tag is not None:
        one = units[0].tag.ctx.one()
        tag = one
    if units:
        c0 = units[0][0]
        if isinstance(c0, QuadReal):
            return ExactVector([QuadReal(1, 0, c0.d) for _ in range(n)], tag)
    return ExactVector([Fraction(1) for _ in range(n)], tag)


def _permutation_sign(sigma):
    s = 1
    for i in range(len(sigma)):
        for j in range(i + 1, len(sigma)):
            if sigma[i] > sigma[j]:
                s = -s
    return s


def weight_sum(point, domain, units, cap=10 ** 6):
    """Sum of weighted indicators over all unit translates of `point`.

    Exactly evaluates sum_{u in E} sum_i a_i 1_{C_i}(u * x).  The relevant
    translates are confined by coordinate-ratio windows, so the sum is finite;
    ranks 0, 1, 2 of the unit group are supported (fields of degree <= 3).
    """
    if not isinstance(point, ExactVector):
        point = ExactVector(point)
    if not point.all_positive():
        raise ValueError("point must be totally positive")
    r = len(units)
    if r == 0:
        return domain.weighted_indicator(point)
    if r == 1:
        return _weight_sum_rank1(point, domain, units[0], cap)
    if r == 2:
        return _weight_sum_rank2(point, domain, units)
    raise NotImplementedError("unit rank > 2")


def _ratio_window(domain, i, n):
    """Global bounds of coordinate-i/coordinate-(n-1) ratios over the support."""
    lo = hi = None
    for _w, closure in domain.terms:
        for g in closure.generators:
            rho = g[i] / g[n - 1]
            if lo is None or scalar_sign(rho - lo) < 0:
                lo = rho
            if hi is None or scalar_sign(rho - hi) > 0:
                hi = rho
    return lo, hi


def _weight_sum_rank1(point, domain, eps, cap):
    n = len(point)
    lo, hi = _ratio_window(domain, 0, n)
    if lo is None:
        return 0
    rho_eps = eps[0] / eps[n - 1]
    up = scalar_sign(rho_eps - 1) > 0  # translate ratio grows with k
    total = 0

    def ratio(p):
        return p[0] / p[n - 1]

    # walk down to below the window, then sweep upward through it
    cur = point
    k = 0
    steps = 0
    while scalar_sign(ratio(cur) - lo) >= 0:
        cur = cur.act(_vector_power(eps, -1 if up else 1))
        k -= 1 if up else -1
        steps += 1
        if steps > cap:
            raise InvariantError("translate search exceeded cap")
    # cur is now strictly below the window; move upward collecting hits
    step_vec = eps if up else _vector_power(eps, -1)
    steps = 0
    while scalar_sign(ratio(cur) - hi) <= 0:
        total += domain.weighted_indicator(cur)
        cur = cur.act(step_vec)
        steps += 1
        if steps > cap:
            raise InvariantError("translate sweep exceeded cap")
    total += domain.weighted_indicator(cur)  # boundary safety
    return total


def _vector_power(v, k):
    out = []
    for c in v.coords:
        if k >= 0:
            acc = c ** k if not isinstance(c, QuadReal) else _qpow(c, k)
        else:
            acc = (1 / c) ** (-k) if not isinstance(c, QuadReal) else _qpow(1 / c, -k)
        out.append(acc)
    return ExactVector(out)


def _qpow(q, k):
    out = QuadReal(1, 0, q.d)
    base = q
    while k:
        if k & 1:
            out = out * base
        base = base * base
        k >>= 1
    return out


def _weight_sum_rank2(point, domain, units):
    n = len(point)
    assert n >= 3
    # integer exponent box from interval logs of the ratio constraints
    bits = 64
    while True:
        box = _rank2_box(point, domain, units, n, bits)
        if box is not None:
            break
        bits *= 2
        if bits > 4096:
            raise InvariantError("exponent box could not be certified")
    (k1_lo, k1_hi), (k2_lo, k2_hi) = box
    total = 0
    for k1 in range(k1_lo - 1, k1_hi + 2):
        u1 = _vector_power(units[0], k1)
        for k2 in range(k2_lo - 1, k2_hi + 2):
            trans = point.act(u1).act(_vector_power(units[1], k2))
            total += domain.weighted_indicator(trans)
    return total


def _rank2_box(point, domain, units, n, bits):
    rows = []
    rhs = []
    for i in range(n - 1):
        lo, hi = _ratio_window(domain, i, n)
        if lo is None:
            return ((0, -1), (0, -1))
        rho_x = point[i] / point[n - 1]
        tgt_lo = _interval_log_ratio(lo, rho_x, bits)
        tgt_hi = _interval_log_ratio(hi, rho_x, bits)
        row = []
        for u in units:
            rho_u = u[i] / u[n - 1]
            l, h = scalar_enclosure(rho_u, bits)
            row.append(_Interval(*log_enclosure(l, h, bits)))
        rows.append(row)
        rhs.append(_Interval(min(tgt_lo.lo, tgt_hi.lo), max(tgt_lo.hi, tgt_hi.hi)))
    if n - 1 != 2:
        # overdetermined: use the first two constraints (others only shrink)
        rows, rhs = rows[:2], rhs[:2]
    det = rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    if det.sign() == 0:
        return None
    inv_det_lo = min(Fraction(1) / det.lo, Fraction(1) / det.hi)
    inv_det_hi = max(Fraction(1) / det.lo, Fraction(1) / det.hi)
    inv_det = _Interval(inv_det_lo, inv_det_hi)
    k1 = (rhs[0] * rows[1][1] - rhs[1] * rows[0][1]) * inv_det
    k2 = (rows[0][0] * rhs[1] - rows[1][0] * rhs[0]) * inv_det
    return ((math.floor(k1.lo), math.ceil(k1.hi)),
            (math.floor(k2.lo), math.ceil(k2.hi)))


def _interval_log_ratio(target, rho_x, bits):
    t_lo, t_hi = scalar_enclosure(target, bits)
    x_lo, x_hi = scalar_enclosure(rho_x, bits)
    lo1 = log_enclosure(t_lo, t_hi, bits)
    lo2 = log_enclosure(x_lo, x_hi, bits)
    return _Interval(lo1[0] - lo2[1], lo1[1] - lo2[0])
