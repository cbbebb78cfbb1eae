"""Shintani zeta values at s = 0 over signed cone domains, and Stickelberger
elements of narrow ray class groups.

Evaluation is exact end to end: lattice-coset points in each half-open cone
parallelepiped are enumerated over Z, and the value at s = 0 comes from the
classical Bernoulli closed forms (rank 1: 1/2 - x; rank 2: the B1/B2 formula
with embedding-trace coefficients).  Congruence conditions at p refine the
lattice by CRT.  Residue tables for all cosets mod p^m are built in one
bucketed sweep with numpy int64 accumulators whose bounds are asserted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import ENGINE_VERSION
from .cache import NullCache
from .cones import embed_element, signed_fundamental_domain
from .errors import ConfigError, DegenerateShiftError, InvariantError
from .field import IdealF, shintani_unit
from .intmat import integer_solve
from .rayclass import RayClassGroup, validate_config


# ---------------------------------------------------------------------------
# closed forms at s = 0


def hurwitz_zero(c):
    """Value at s = 0 of sum_{k>=0} (c + k)^(-s), for c in (0, 1]."""
    c = Fraction(c)
    if not 0 < c <= 1:
        raise ValueError("Hurwitz parameter must lie in (0, 1]")
    return Fraction(1, 2) - c


def _b1(x):
    return x - Fraction(1, 2)


def _b2(x):
    return x * x - x + Fraction(1, 6)


def rank2_zero(c1, c2, t12, t21):
    """Value at s = 0 of the two-variable Shintani sum with parallelepiped
    parameters (c1, c2) in (0, 1]^2 and generator ratio traces t12, t21."""
    return _b1(c1) * _b1(c2) + _b2(c1) * t12 / 4 + _b2(c2) * t21 / 4


# ---------------------------------------------------------------------------
# lattices, shifts, congruence conditions


@dataclass(frozen=True)
class CongruenceCondition:
    """Either no condition, or the coset a + p^m O_p (a reduced mod p^m)."""

    residue: tuple = None
    level: int = 0

    @classmethod
    def all(cls):
        return cls(None, 0)

    @classmethod
    def coset(cls, residue, level):
        if level < 1:
            raise ValueError("coset level must be >= 1")
        return cls(tuple(residue), level)

    @property
    def is_all(self):
        return self.residue is None

    def descriptor(self):
        if self.is_all:
            return "all"
        return "coset(%d,%d;m=%d)" % (self.residue[0], self.residue[1], self.level)


def scale_into(g, lattice):
    """Smallest positive rational multiple of g lying in the lattice ideal."""
    quot = lattice * IdealF(g.ctx, g).inverse()
    return quot.rational_content() * g


def canonical_shift(ctx, b_ideal, conductor):
    """Deterministic z in b^-1 with z = 1 mod conductor, of minimal height."""
    if not b_ideal.is_coprime(conductor):
        raise ConfigError("ideal %s is not coprime to the conductor" % b_ideal.descriptor())
    j = b_ideal.inverse()
    translate = j * conductor
    if j.contains(ctx.one()):
        z0 = ctx.one()
    else:
        # solve z in J with z - 1 in n*(J + O): CRT across the two conditions
        m_lat = conductor * j.ideal_sum(IdealF(ctx, ctx.one()))
        den = j.den * m_lat.den // math.gcd(j.den, m_lat.den)
        rows = []
        for r in j.basis:
            f = den // j.den
            rows.append([r[0] * f, r[1] * f])
        m_rows = []
        for r in m_lat.basis:
            f = den // m_lat.den
            m_rows.append([r[0] * f, r[1] * f])
        # columns: coefficients of the J-basis and of the M-basis
        a = [[rows[0][0], rows[1][0], -m_rows[0][0], -m_rows[1][0]],
             [rows[0][1], rows[1][1], -m_rows[0][1], -m_rows[1][1]]]
        target = [den, 0]  # coordinates of 1, scaled by den
        sol = integer_solve(a, target)
        if sol is None:
            raise InvariantError("CRT shift has no solution; coprimality broken")
        z0 = ctx.elem(Fraction(sol[0] * rows[0][0] + sol[1] * rows[1][0], den),
                      Fraction(sol[0] * rows[0][1] + sol[1] * rows[1][1], den))
    # reduce to a minimal-height representative modulo the translate lattice
    z = _reduce_mod_lattice(ctx, z0, translate)
    assert j.contains(z), "shift must lie in the inverse ideal"
    assert _congruent_one(ctx, z, conductor), "shift must be 1 mod conductor"
    return z


def _congruent_one(ctx, z, conductor):
    # z = 1 mod* n: (z - 1) lies in n locally at every divisor of n
    diff = z - 1
    if diff.is_zero():
        return True
    for prime, e in conductor.factor():
        from .field import element_valuation
        if element_valuation(diff, prime) < e:
            return False
    return True


def _reduce_mod_lattice(ctx, z, lattice):
    b = lattice.basis_elements()
    # round the basis coordinates of z, then scan a small window
    from .intmat import solve_rational
    m = [[b[0].a, b[1].a], [b[0].b, b[1].b]]
    coeffs = solve_rational(m, [z.a, z.b])
    base = z - round(coeffs[0]) * b[0] - round(coeffs[1]) * b[1]
    best = None
    for i in range(-2, 3):
        for k in range(-2, 3):
            cand = base + i * b[0] + k * b[1]
            keyv = (cand.height(), cand.a, cand.b)
            if best is None or keyv < best[0]:
                best = (keyv, cand)
    return best[1]


def refine_to_coset(ctx, lattice, z, condition, p):
    """Lattice and shift for {x in z + L : x = a mod p^m}: (p^m L, z + l0)."""
    if condition.is_all:
        return lattice, z
    m = condition.level
    big_p = p ** m
    lam = lattice.gen
    a_elem = ctx.elem(condition.residue[0], condition.residue[1])
    u = (a_elem - z) / lam
    ured = _mod_reduce_coords(u, big_p)
    l0 = lam * ctx.elem(ured[0], ured[1])
    z2 = z + l0
    check = (a_elem - z2) / (big_p)
    _mod_reduce_coords(check, 1)  # raises if denominators hit p
    return lattice * big_p, z2


def _mod_reduce_coords(elem, modulus):
    """Coordinates of elem reduced mod `modulus`; denominators must be coprime."""
    out = []
    for c in (elem.a, elem.b):
        if modulus == 1:
            if math.gcd(c.denominator, 1) != 1:
                raise InvariantError("unexpected denominator")
            out.append(0)
            continue
        inv = pow(c.denominator, -1, modulus)
        out.append((c.numerator * inv) % modulus)
    return tuple(out)


# ---------------------------------------------------------------------------
# cone-face zeta values over a lattice coset (exact, single value)


def cone_zeta_at_zero(face_gens, lattice, shift, allow_lattice_shift=False):
    """Value at s = 0 of sum over (shift + lattice) inside the open cone.

    face_gens: one or two totally positive field elements spanning the face.
    A shift inside the lattice puts the coset through the cone vertex and is
    rejected unless the caller states that this is intended (the open-cone
    enumeration itself never touches the vertex).
    """
    ctx = shift.ctx
    if not allow_lattice_shift and lattice.contains(shift):
        raise DegenerateShiftError(
            "lattice coset passes through the cone vertex; perturb the shift z "
            "or pass allow_lattice_shift=True if this is intended")
    for g in face_gens:
        if not g.is_totally_positive():
            raise ValueError("cone generators must be totally positive")
    if len(face_gens) == 1:
        return _rank1_value(ctx, face_gens[0], lattice, shift)
    if len(face_gens) == 2:
        return _rank2_value(ctx, face_gens[0], face_gens[1], lattice, shift)
    raise ValueError("closed forms available for ranks 1 and 2 only")


def _lattice_rows(lattice):
    den = lattice.den
    rows = lattice.basis
    return den, rows


def _rank1_progression(ctx, w, lattice, shift):
    """(offset, step) with {t : t*w in shift + lattice} = offset + step*Z, or None."""
    den, rows = _lattice_rows(lattice)
    from .intmat import solve_rational
    m = [[Fraction(rows[0][0], den), Fraction(rows[1][0], den)],
         [Fraction(rows[0][1], den), Fraction(rows[1][1], den)]]
    u = solve_rational(m, [w.a, w.b])
    q = solve_rational(m, [shift.a, shift.b])
    # conditions: t*u_i - q_i integral for i = 0, 1
    progs = []
    for ui, qi in zip(u, q):
        if ui == 0:
            if qi.denominator != 1:
                return None
            continue
        progs.append((qi / ui, abs(Fraction(1) / ui)))
    if not progs:
        return None
    off, step = progs[0]
    for off2, step2 in progs[1:]:
        merged = _merge_progressions(off, step, off2, step2)
        if merged is None:
            return None
        off, step = merged
    return off, step


def _merge_progressions(o1, s1, o2, s2):
    """Intersection of o1 + s1 Z and o2 + s2 Z as a progression, or None."""
    # solve o1 + s1 k = o2 + s2 j over integers k, j
    diff = o2 - o1
    den = s1.denominator * s2.denominator * diff.denominator
    a = int(s1 * den)
    b = int(s2 * den)
    c = int(diff * den)
    g = math.gcd(a, b)
    if c % g != 0:
        return None
    a_, b_, c_ = a // g, b // g, c // g
    k0 = (c_ * pow(a_, -1, b_)) % b_
    return o1 + s1 * k0, s1 * b_


def _positive_position(offset, step):
    """c in (0, 1] with {offset + step*Z, > 0} = step*(c + Z>=0); step > 0."""
    r = offset / step
    frac = r - math.floor(r)
    return frac if frac > 0 else Fraction(1)


def _rank1_value(ctx, g, lattice, shift):
    w = scale_into(g, lattice)
    prog = _rank1_progression(ctx, w, lattice, shift)
    if prog is None:
        return Fraction(0)
    off, step = prog
    return hurwitz_zero(_positive_position(off, step))


def _lattice_coords(elem, lattice):
    """Integer coordinates of a lattice element over the lattice basis."""
    den, rows = _lattice_rows(lattice)
    det = rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    xa = elem.a * den
    xb = elem.b * den
    c1 = (xa * rows[1][1] - xb * rows[1][0]) / det
    c2 = (-xa * rows[0][1] + xb * rows[0][0]) / det
    assert c1.denominator == 1 and c2.denominator == 1, "element not in lattice"
    return int(c1), int(c2)


def _from_lattice_coords(ctx, coords, lattice):
    den, rows = _lattice_rows(lattice)
    return ctx.elem(Fraction(coords[0] * rows[0][0] + coords[1] * rows[1][0], den),
                    Fraction(coords[0] * rows[0][1] + coords[1] * rows[1][1], den))


def _primitive(vec):
    g = math.gcd(vec[0], vec[1])
    return (vec[0] // g, vec[1] // g)


def subdivide_face(ctx, g1, g2, lattice):
    """Continued-fraction subdivision of the open cone C(g1, g2) into
    lattice-unimodular rank-2 subcones plus the interior rays between them.

    Returns (pieces, rays): pieces are generator pairs (lattice elements) with
    parallelepiped index one; rays are single interior generators.  The
    disjoint union of the open pieces and rays is the original open cone.
    """
    u = _primitive(_lattice_coords(scale_into(g1, lattice), lattice))
    v = _primitive(_lattice_coords(scale_into(g2, lattice), lattice))
    cross = u[0] * v[1] - u[1] * v[0]
    assert cross != 0
    if cross < 0:
        u, v = v, u
        cross = -cross
    pieces = []
    rays = []
    while cross > 1:
        # m with det(u, m) = 1, det(m, v) in [1, cross): strictly interior
        g, x, y = _ext_gcd(u[0], u[1])
        assert g == 1
        m = (-y, x)  # u[0]*x' ... chosen so u x m = u0*m1 - u1*m0 = 1
        assert u[0] * m[1] - u[1] * m[0] == 1
        dmv = m[0] * v[1] - m[1] * v[0]
        # translate by multiples of u to land det(m, v) in [1, cross]
        k = -((dmv - 1) // cross)
        m = (m[0] + k * u[0], m[1] + k * u[1])
        dmv = m[0] * v[1] - m[1] * v[0]
        assert 1 <= dmv < cross, (dmv, cross)
        pieces.append((u, m))
        rays.append(m)
        u, cross = m, dmv
    pieces.append((u, v))
    to_elem = lambda c: _from_lattice_coords(ctx, c, lattice)
    return ([(to_elem(a), to_elem(b)) for a, b in pieces],
            [to_elem(r) for r in rays])


def _ext_gcd(a, b):
    if b == 0:
        return (a, 1, 0) if a >= 0 else (-a, -1, 0)
    g, x, y = _ext_gcd(b, a % b)
    return g, y, x - (a // b) * y


def _unimodular_base_point(w1, w2, shift):
    """The unique coset point of the index-one parallelepiped: (c1, c2, beta).

    (w1, w2) is a Z-basis of the lattice, so the coset point is shift reduced
    into (0,1]^2 coordinates; beta is the point itself.
    """
    from .intmat import solve_rational
    m = [[w1.a, w2.a], [w1.b, w2.b]]
    g1, g2 = solve_rational(m, [shift.a, shift.b])
    k1 = math.ceil(g1) - 1
    k2 = math.ceil(g2) - 1
    c1 = g1 - k1
    c2 = g2 - k2
    beta = shift - k1 * w1 - k2 * w2
    assert 0 < c1 <= 1 and 0 < c2 <= 1
    return c1, c2, beta


def _rank2_value(ctx, g1, g2, lattice, shift):
    pieces, rays = subdivide_face(ctx, g1, g2, lattice)
    total = Fraction(0)
    for w1, w2 in pieces:
        c1, c2, _beta = _unimodular_base_point(w1, w2, shift)
        t12 = (w1 / w2).trace()
        t21 = (w2 / w1).trace()
        total += rank2_zero(c1, c2, t12, t21)
    for ray in rays:
        total += _rank1_value(ctx, ray, lattice, shift)
    return total


# ---------------------------------------------------------------------------
# the Shintani zeta of an ideal against a signed domain


def shintani_zeta(b_ideal, condition, domain, conductor, p=None, cache=None, shift=None):
    """zeta(b, U, D, 0): signed sum of cone-face zeta values at s = 0.

    `domain` is a SignedDomain whose generators carry field-element tags.
    The representative z is the canonical one unless `shift` overrides it.
    """
    ctx = b_ideal.ctx
    cache = cache or NullCache()
    key = None
    if shift is None and not isinstance(cache, NullCache):
        key = "|".join([
            "zeta0", ENGINE_VERSION, "d=%d" % ctx.d,
            "cond=%s" % conductor.descriptor(), "b=%s" % b_ideal.descriptor(),
            "D=%s" % domain.descriptor, "U=%s" % condition.descriptor(),
        ])
        hit = cache.get(key)
        if hit is not None:
            return Fraction(hit.strip())
    z = shift if shift is not None else canonical_shift(ctx, b_ideal, conductor)
    lattice = b_ideal.inverse() * conductor
    if not condition.is_all:
        if p is None:
            raise ValueError("congruence conditions need the prime p")
        lattice, z = refine_to_coset(ctx, lattice, z, condition, p)
    total = Fraction(0)
    for weight, closure in domain.terms:
        for subset, _cone in closure.faces():
            gens = [closure.generators[i].tag for i in subset]
            if any(g is None for g in gens):
                raise ValueError("domain generators must carry field tags")
            total += weight * cone_zeta_at_zero(gens, lattice, z)
    if key is not None:
        cache.put(key, str(total))
    return total


def reverify_cached_value(cache, ctx, conductor, domain, reps, rng=None):
    """Recompute one random cached single-value entry for this configuration.

    Detects cache corruption: picks a cached zeta0 entry whose key matches the
    current field, conductor, and domain, recomputes it from scratch, and
    raises InvariantError on mismatch.  Returns the number of entries checked.
    """
    entry = cache.random_entry(rng)
    if entry is None:
        return 0
    preimage, payload = entry
    parts = preimage.split("|")
    if parts[0] != "zeta0" or parts[1] != ENGINE_VERSION:
        return 0
    fields = dict(kv.split("=", 1) for kv in parts[2:])
    if (fields.get("d") != str(ctx.d)
            or fields.get("cond") != conductor.descriptor()
            or fields.get("D") != domain.descriptor
            or fields.get("U") != "all"):
        return 0
    target = None
    for ideal in reps.values():
        if ideal.descriptor() == fields.get("b"):
            target = ideal
            break
    if target is None:
        return 0
    fresh = shintani_zeta(target, CongruenceCondition.all(), domain, conductor,
                          cache=NullCache())
    if fresh != Fraction(payload.strip()):
        raise InvariantError("cache corruption detected for key %r" % preimage)
    return 1


# ---------------------------------------------------------------------------
# residue tables: all cosets mod p^m in one sweep


_INT64_SAFE = 1 << 52


def _face_table_job(args):
    ctx, gens, lattice, z, big_p, weight = args
    if len(gens) == 1:
        return _rank1_table(ctx, gens[0], lattice, z, big_p, weight)
    return _rank2_table(ctx, gens[0], gens[1], lattice, z, big_p, weight)


def zeta_residue_table(b_ideal, domain, conductor, p, m, cache=None, workers=1):
    """Exact table of zeta(b, a + p^m O_p, D, 0) over all residues a mod p^m.

    Returns (nums, den): a list of p^(2m) integers (bucket index x * p^m + y)
    and a positive common denominator.  Faces are evaluated across `workers`
    processes when asked; the merge is order-deterministic either way.
    """
    ctx = b_ideal.ctx
    cache = cache or NullCache()
    key = "|".join([
        "table", ENGINE_VERSION, "d=%d" % ctx.d,
        "cond=%s" % conductor.descriptor(), "b=%s" % b_ideal.descriptor(),
        "D=%s" % domain.descriptor, "p=%d" % p, "m=%d" % m,
    ])
    hit = cache.get(key)
    if hit is not None:
        lines = hit.strip().split("\n")
        den = int(lines[0])
        nums = [int(x) for x in lines[1].split()]
        return nums, den
    z = canonical_shift(ctx, b_ideal, conductor)
    lattice = b_ideal.inverse() * conductor
    big_p = p ** m
    jobs = []
    for weight, closure in domain.terms:
        for subset, _cone in closure.faces():
            gens = [closure.generators[i].tag for i in subset]
            if any(g is None for g in gens):
                raise ValueError("domain generators must carry field tags")
            if len(gens) not in (1, 2):
                raise ValueError("table path supports ranks 1 and 2")
            jobs.append((ctx, gens, lattice, z, big_p, weight))
    size = big_p * big_p
    total = np.zeros(size, dtype=np.int64)
    den = 1
    if workers > 1 and len(jobs) > 1:
        from multiprocessing import get_context
        with get_context("fork").Pool(processes=min(workers, len(jobs))) as pool:
            for nums, d in pool.imap(_face_table_job, jobs):
                total, den = _merge_nums(total, den, nums, d, size)
                del nums
    else:
        for job in jobs:
            nums, d = _face_table_job(job)
            total, den = _merge_nums(total, den, nums, d, size)
            del nums
    total, den = _normalize_table(total, den)
    if not isinstance(cache, NullCache):
        cache.put(key, "%d\n%s" % (den, " ".join(str(v) for v in total)))
    return total, den


def _normalize_table(total, den):
    """Divide out the common gcd; returns (list-of-int, den)."""
    if isinstance(total, np.ndarray):
        total = total.tolist()
    g = den
    for v in total:
        if v:
            g = math.gcd(g, v)
        if g == 1:
            return total, den
    if g > 1:
        total = [v // g for v in total]
        den //= g
    return total, den


def _rank1_table(ctx, g, lattice, z, big_p, weight):
    """Bucketed rank-1 face values, sparse: {bucket: numerator} over a denominator."""
    w = scale_into(g, lattice)
    prog = _rank1_progression(ctx, w, lattice, z)
    if prog is None:
        return {}, 1
    off, step = prog
    # residue of (off + j*step)*w walks by step*w; positions live over step*big_p
    start = _mod_reduce_coords(off * w, big_p)
    stepr = _mod_reduce_coords(step * w, big_p)
    ratio = off / (step * big_p)
    common = ratio.denominator * big_p // math.gcd(ratio.denominator, big_p)
    a_num = int(ratio * common)
    b_num = common // big_p
    x, y = start
    nums = {}
    for j in range(big_p):
        pos_num = (a_num + j * b_num) % common
        if pos_num == 0:
            pos_num = common
        # value = 1/2 - pos_num/common over denominator 2*common
        idx = (x % big_p) * big_p + (y % big_p)
        nums[idx] = nums.get(idx, 0) + weight * (common - 2 * pos_num)
        x += stepr[0]
        y += stepr[1]
    return nums, 2 * common


def _rank2_table(ctx, g1, g2, lattice, z, big_p, weight):
    """Bucketed rank-2 face values via unimodular pieces and residue sweeps."""
    pieces, rays = subdivide_face(ctx, g1, g2, lattice)
    size = big_p * big_p
    total = np.zeros(size, dtype=np.int64)
    den_total = 1
    for w1, w2 in pieces:
        nums, d = _rank2_piece_table(ctx, w1, w2, lattice, z, big_p, weight)
        total, den_total = _merge_nums(total, den_total, nums, d, size)
        del nums
    for ray in rays:
        nums, d = _rank1_table(ctx, ray, lattice, z, big_p, weight)
        total, den_total = _merge_nums(total, den_total, nums, d, size)
        del nums
    return total, den_total


_INT64_GUARD = 1 << 62


def _abs_max(values):
    if isinstance(values, np.ndarray):
        return int(np.abs(values).max(initial=0))
    if isinstance(values, dict):
        return max((abs(v) for v in values.values()), default=0)
    return max((abs(v) for v in values), default=0)


def _merge_nums(total, den_total, nums, d, size):
    """total/den_total += nums/d, exactly; keeps int64 arrays while safe.

    `total` is an int64 array or a list of Python ints; `nums` may be an
    array, a list, or a sparse dict.  Returns the new (total, den).
    """
    new_den = den_total * d // math.gcd(den_total, d)
    scale_old = new_den // den_total
    scale_new = new_den // d
    tot_max = _abs_max(total)
    nums_max = _abs_max(nums)
    bound = tot_max * scale_old + nums_max * scale_new
    if isinstance(total, np.ndarray):
        if bound < _INT64_GUARD:
            if scale_old != 1 and tot_max:
                total *= scale_old
            if isinstance(nums, dict):
                for i, v in nums.items():
                    total[i] += v * scale_new
            elif nums_max:
                arr = nums if isinstance(nums, np.ndarray) else np.asarray(nums, dtype=np.int64)
                if scale_new == 1:
                    total += arr
                else:
                    total += arr * scale_new
            return total, new_den
        total = total.tolist()
    # exact big-int path
    if isinstance(nums, dict):
        if scale_old != 1:
            total = [v * scale_old for v in total]
        for i, v in nums.items():
            total[i] += v * scale_new
    else:
        if isinstance(nums, np.ndarray):
            nums = nums.tolist()
        if scale_old == 1 and scale_new == 1:
            for i, v in enumerate(nums):
                if v:
                    total[i] += v
        else:
            for i in range(size):
                total[i] = total[i] * scale_old + nums[i] * scale_new
    return total, new_den


def _rank2_piece_table(ctx, w1, w2, lattice, z, big_p, weight):
    """Residue table of a single unimodular cone piece."""
    c1, c2, beta = _unimodular_base_point(w1, w2, z)
    t12 = (w1 / w2).trace()
    t21 = (w2 / w1).trace()
    size = big_p * big_p
    d0 = c1.denominator * c2.denominator // math.gcd(c1.denominator, c2.denominator)
    dp = d0 * big_p
    if 21 * (2 * dp) ** 2 >= (1 << 62):
        raise InvariantError("table numerators would overflow the fast path; "
                             "reduce the level m")
    w1r = _mod_reduce_coords(w1, big_p)
    w2r = _mod_reduce_coords(w2, big_p)
    acc11 = np.zeros(size, dtype=np.int64)
    acc2a = np.zeros(size, dtype=np.int64)
    acc2b = np.zeros(size, dtype=np.int64)
    j = np.arange(big_p, dtype=np.int64)
    b_res = _mod_reduce_coords(beta, big_p)
    u1 = int(c1 * d0)
    u2 = int(c2 * d0)
    # B1 numerators over 2*dp, B2 numerators over 6*dp^2
    n1 = 2 * u1 + d0 * (2 * j - big_p)
    n2 = 2 * u2 + d0 * (2 * j - big_p)
    v1 = u1 + d0 * j
    v2 = u2 + d0 * j
    q1 = 6 * v1 * v1 - 6 * v1 * dp + dp * dp
    q2 = 6 * v2 * v2 - 6 * v2 * dp + dp * dp
    x_idx = (b_res[0] + j * w1r[0]) % big_p
    y_idx = (b_res[1] + j * w1r[1]) % big_p
    x2 = (j * w2r[0]) % big_p
    y2 = (j * w2r[1]) % big_p
    idx = ((x_idx[:, None] + x2[None, :]) % big_p) * big_p \
        + ((y_idx[:, None] + y2[None, :]) % big_p)
    idx = idx.reshape(-1)
    prod11 = (n1[:, None] * n2[None, :]).reshape(-1)
    np.add.at(acc11, idx, prod11)
    np.add.at(acc2a, idx, np.broadcast_to(q1[:, None], (big_p, big_p)).reshape(-1))
    np.add.at(acc2b, idx, np.broadcast_to(q2[None, :], (big_p, big_p)).reshape(-1))
    t12n, t12d = t12.numerator, t12.denominator
    t21n, t21d = t21.numerator, t21.denominator
    den_out = 24 * dp * dp * t12d * t21d
    k11 = 6 * t12d * t21d
    k2a = t12n * t21d
    k2b = t21n * t12d
    bound = (int(np.abs(acc11).max(initial=0)) * abs(k11)
             + int(np.abs(acc2a).max(initial=0)) * abs(k2a)
             + int(np.abs(acc2b).max(initial=0)) * abs(k2b)) * abs(weight)
    if bound < _INT64_GUARD:
        nums = acc11 * k11
        nums += acc2a * k2a
        nums += acc2b * k2b
        if weight != 1:
            nums *= weight
        return nums, den_out
    nums = [weight * (a * k11 + b * k2a + c * k2b)
            for a, b, c in zip(acc11.tolist(), acc2a.tolist(), acc2b.tolist())]
    return nums, den_out


# ---------------------------------------------------------------------------
# Stickelberger elements


class StickelbergerElement:
    """Theta_{S,T} = sum_sigma zeta_{S,T}(sigma) sigma^{-1} over a ray class group."""

    def __init__(self, rcg, values):
        self.rcg = rcg
        self.values = dict(values)  # class tuple -> Fraction (int after checks)

    def value(self, cls):
        return self.values[cls]

    def augmentation(self):
        return sum(self.values.values())

    def coefficient(self, cls):
        """Coefficient of the group element `cls` (note the inversion)."""
        return self.values[self.rcg.group.inv(cls)]

    def char_value(self, chi):
        """chi(Theta) = sum_sigma zeta(sigma) chi(sigma)^{-1}."""
        total = None
        for cls, v in self.values.items():
            term = chi(self.rcg.group.inv(cls)) * v
            total = term if total is None else total + term
        return total

    def sharp_char_value(self, chi):
        """chi(Theta^#) = sum_sigma zeta(sigma) chi(sigma)."""
        total = None
        for cls, v in self.values.items():
            term = chi(cls) * v
            total = term if total is None else total + term
        return total

    def is_integral(self):
        return all(Fraction(v).denominator == 1 for v in self.values.values())

    def __repr__(self):
        return "StickelbergerElement(%s)" % (self.values,)


def build_domain(ctx, conductor, invert_unit=False):
    """Signed fundamental domain for E(conductor) from the Shintani unit."""
    su = shintani_unit(ctx, conductor)
    eps = su.epsilon if not invert_unit else ctx.one() / su.epsilon
    label = "ddf[%s%s]" % (eps.a, "%+d*w" % eps.b if eps.b else "")
    return signed_fundamental_domain([embed_element(eps)], descriptor=label), su


def stickelberger(ctx, conductor, ell_ideal, cache=None, rcg=None, domain=None,
                  reps=None, coprime_extra=None, check=True):
    """Theta_{S,T} for S = {v | conductor, infinity}, T = {ell_ideal}.

    Verifies integrality, zero augmentation, annihilation by 1 + c_vi, and
    vanishing at characters trivial on either archimedean involution before
    returning; failures raise InvariantError (engine bug, not user error).
    """
    cache = cache or NullCache()
    if rcg is None:
        rcg = RayClassGroup(ctx, conductor)
    if domain is None:
        domain, _su = build_domain(ctx, conductor)
    ell = int(ell_ideal.norm)
    avoid = conductor * ell_ideal
    if coprime_extra is not None:
        avoid = avoid * coprime_extra
    if reps is None:
        reps = rcg.class_representatives(avoid)
    sigma_ell = rcg.class_of(ell_ideal)
    z_s = {}
    for cls, ideal in reps.items():
        z_s[cls] = shintani_zeta(ideal, CongruenceCondition.all(), domain,
                                 conductor, cache=cache)
    values = {}
    inv_ell = rcg.group.inv(sigma_ell)
    for cls in z_s:
        values[cls] = z_s[cls] - ell * z_s[rcg.group.op(cls, inv_ell)]
    theta = StickelbergerElement(rcg, values)
    if check:
        _check_theta_invariants(theta)
        for cls in values:
            values[cls] = int(values[cls])
    return theta


def _check_theta_invariants(theta):
    rcg = theta.rcg
    if not theta.is_integral():
        raise InvariantError("Stickelberger coefficients must be integers: %s"
                             % theta.values)
    if theta.augmentation() != 0:
        raise InvariantError("Stickelberger augmentation must vanish")
    for c_inv, name in ((rcg.c_v1, "c_v1"), (rcg.c_v2, "c_v2")):
        for cls, v in theta.values.items():
            if v + theta.values[rcg.group.op(cls, c_inv)] != 0:
                raise InvariantError("(1 + %s) * Theta must vanish" % name)
    one = None
    for chi in rcg.characters():
        triv1 = chi.is_trivial_on(rcg.c_v1)
        triv2 = chi.is_trivial_on(rcg.c_v2)
        if triv1 or triv2:
            val = theta.char_value(chi)
            if not val.is_zero():
                raise InvariantError(
                    "chi(Theta) must vanish for characters trivial on an "
                    "archimedean involution; offender %s" % (chi.exponents,))


def ideal_divisors(ideal):
    """All integral divisors of an integral ideal, unit ideal included."""
    ctx = ideal.ctx
    factors = ideal.factor()
    divisors = [IdealF(ctx, ctx.one())]
    for prime, e in factors:
        new = []
        for dv in divisors:
            cur = dv
            for k in range(e + 1):
                new.append(dv * prime ** k if k else dv)
        divisors = []
        seen = set()
        for dv in new:
            if dv.key() not in seen:
                seen.add(dv.key())
                divisors.append(dv)
    return sorted(divisors, key=lambda i: (i.norm, i.descriptor()))


def stickelberger_at_level(ctx, conductor, level_ideal, ell_ideal, cache=None):
    """Theta_{S(f),T} for a divisor f of the conductor (f != (1))."""
    if level_ideal.is_unit_ideal():
        raise ValueError("level must differ from (1)")
    if not level_ideal.contains_ideal(conductor):
        raise ValueError("level must divide the conductor")
    return stickelberger(ctx, level_ideal, ell_ideal, cache=cache)


def theta_s_infinity(ctx, conductor, ell_ideal, cache=None, rcg=None):
    """Theta_{S_infinity, T} assembled per character from primitive values.

    Only totally odd characters carry a nonzero primitive value; each is
    evaluated on the Stickelberger element at its own finite conductor, and
    the group-ring element is reassembled through the idempotents.  Values
    are rational with denominator dividing #G (not integral in general).
    """
    from .cyclotomic import Cyclotomic
    cache = cache or NullCache()
    if rcg is None:
        rcg = RayClassGroup(ctx, conductor)
    if ctx.fundamental_unit.norm() == 1:
        raise ConfigError("assembly at S_infinity needs a field with narrow "
                          "class number one (fundamental unit of norm -1)")
    divisors = [dv for dv in ideal_divisors(conductor) if not dv.is_unit_ideal()]
    level_data = []
    for dv in divisors:
        if dv.key() == conductor.key():
            level_data.append((dv, rcg, None, None))
        else:
            sub_rcg = RayClassGroup(ctx, dv)
            hom = rcg.hom_to(sub_rcg)
            level_data.append((dv, sub_rcg, hom, set(hom.kernel())))
    level_data.sort(key=lambda it: (it[0].norm, it[0].descriptor()))
    thetas = {}

    chars = [chi for chi in rcg.characters() if chi.is_totally_odd()]
    n_g = rcg.order
    e = chars[0].e if chars else 1
    acc = {cls: Cyclotomic.rational(e, 0) for cls in rcg.group.elements()}
    for chi in chars:
        kernel = set(chi.kernel())
        dv, sub_rcg, hom, hom_ker = next(
            (it for it in level_data if it[2] is None or it[3] <= kernel))
        if dv.key() not in thetas:
            thetas[dv.key()] = stickelberger(ctx, dv, ell_ideal, cache=cache,
                                             rcg=sub_rcg)
        theta = thetas[dv.key()]
        if hom is None:
            val = theta.char_value(chi)
        else:
            preimage = {}
            for x in rcg.group.elements():
                preimage.setdefault(hom(x), x)
            val = Cyclotomic.rational(e, 0)
            for cls, v in theta.values.items():
                val = val + chi(preimage[sub_rcg.group.inv(cls)]) * v
        for cls in acc:
            acc[cls] = acc[cls] + chi(cls) * val
    values = {}
    for cls, tot in acc.items():
        values[cls] = tot.rational_value() / n_g
    theta_inf = StickelbergerElement(rcg, values)
    if theta_inf.augmentation() != 0:
        raise InvariantError("Theta at S_infinity must have zero augmentation")
    return theta_inf
