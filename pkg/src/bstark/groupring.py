"""Exact algebra over Z[G], Q[G], and (Z/n)[G] for finite abelian G.

Elements are coefficient vectors over a fixed lexicographic enumeration of G.
Ideals carry generator lists; membership goes through the Hermite normal form
of the coefficient lattice spanned by all G-translates of the generators
(with denominators cleared first, and 2-power denominators allowed in the
minus part).  The Sinnott-Kurihara and Atsuta-Kataoka constructions are built
from inertia data of a narrow ray class group.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, combinations_with_replacement

from .abelian import FiniteAbelianGroup, structure_from_generators
from .errors import InvariantError
from .intmat import hnf, hnf_solve, solve_rational


class GroupRing:
    """Z[G], Q[G], or (Z/n)[G]; `ring` is 'Z', 'Q', or ('Zmod', n)."""

    def __init__(self, group, ring="Z"):
        self.group = group
        self.ring = ring
        self.elements = sorted(group.elements())
        self.index = {g: i for i, g in enumerate(self.elements)}
        self.size = len(self.elements)
        self._mul_table = None

    def modulus(self):
        return self.ring[1] if isinstance(self.ring, tuple) else None

    def _norm_scalar(self, c):
        n = self.modulus()
        if n is not None:
            return int(c) % n
        if self.ring == "Z":
            if isinstance(c, Fraction):
                if c.denominator != 1:
                    raise ValueError("non-integral coefficient in Z[G]")
                return int(c)
            return int(c)
        return Fraction(c)

    def zero(self):
        return GroupRingElement(self, [self._norm_scalar(0)] * self.size)

    def one(self):
        return self.monomial(self.group.identity())

    def monomial(self, g, c=1):
        coeffs = [self._norm_scalar(0)] * self.size
        coeffs[self.index[g]] = self._norm_scalar(c)
        return GroupRingElement(self, coeffs)

    def from_dict(self, mapping):
        coeffs = [self._norm_scalar(0)] * self.size
        for g, c in mapping.items():
            coeffs[self.index[g]] = self._norm_scalar(c)
        return GroupRingElement(self, coeffs)

    def norm_element(self, subgroup):
        """Sum of a list of group elements (N I_v when given a subgroup)."""
        out = self.zero().coeffs[:]
        for g in subgroup:
            out[self.index[g]] += self._norm_scalar(1)
        return GroupRingElement(self, [self._norm_scalar(c) for c in out])

    def mul_table(self):
        if self._mul_table is None:
            table = []
            for a in self.elements:
                row = []
                for b in self.elements:
                    row.append(self.index[self.group.op(a, b)])
                table.append(row)
            self._mul_table = table
        return self._mul_table

    def to_rational(self):
        return GroupRing(self.group, "Q")

    def __eq__(self, other):
        return (isinstance(other, GroupRing) and other.group.orders ==
                self.group.orders and other.ring == self.ring)

    def __repr__(self):
        return "GroupRing(%s over %s)" % (self.group.orders, self.ring)


class GroupRingElement:
    __slots__ = ("parent", "coeffs")

    def __init__(self, parent, coeffs):
        self.parent = parent
        self.coeffs = list(coeffs)

    def _coerce(self, other):
        if isinstance(other, GroupRingElement):
            return other
        return self.parent.monomial(self.parent.group.identity(), other)

    def __add__(self, other):
        o = self._coerce(other)
        return GroupRingElement(self.parent, [
            self.parent._norm_scalar(a + b) for a, b in zip(self.coeffs, o.coeffs)])

    def __sub__(self, other):
        o = self._coerce(other)
        return GroupRingElement(self.parent, [
            self.parent._norm_scalar(a - b) for a, b in zip(self.coeffs, o.coeffs)])

    def __neg__(self):
        return GroupRingElement(self.parent, [
            self.parent._norm_scalar(-a) for a in self.coeffs])

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return GroupRingElement(self.parent, [
                self.parent._norm_scalar(a * other) for a in self.coeffs])
        o = self._coerce(other)
        table = self.parent.mul_table()
        out = [0] * self.parent.size
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            row = table[i]
            for j, b in enumerate(o.coeffs):
                if b == 0:
                    continue
                out[row[j]] += a * b
        return GroupRingElement(self.parent, [self.parent._norm_scalar(c) for c in out])

    __rmul__ = __mul__
    __radd__ = __add__

    def sharp(self):
        """The involution induced by g -> g^-1."""
        group = self.parent.group
        out = [0] * self.parent.size
        for i, a in enumerate(self.coeffs):
            if a != 0:
                out[self.parent.index[group.inv(self.parent.elements[i])]] = a
        return GroupRingElement(self.parent, out)

    def augmentation(self):
        total = 0
        for c in self.coeffs:
            total += c
        return self.parent._norm_scalar(total)

    def coefficient(self, g):
        return self.coeffs[self.parent.index[g]]

    def is_zero(self):
        return all(c == 0 for c in self.coeffs)

    def scale_to_integral(self):
        """(integral element, denominator) with self = element / denominator."""
        den = 1
        for c in self.coeffs:
            c = Fraction(c)
            den = den * c.denominator // math.gcd(den, c.denominator)
        ring = GroupRing(self.parent.group, "Z")
        return GroupRingElement(ring, [int(Fraction(c) * den) for c in self.coeffs]), den

    def in_rational_ring(self):
        ring = self.parent.to_rational()
        return GroupRingElement(ring, [Fraction(c) for c in self.coeffs])

    def is_integral(self):
        return all(Fraction(c).denominator == 1 for c in self.coeffs)

    def minus_projection(self, c_elem):
        """x * (1 - c)/2 in Q[G]: the minus-part component."""
        ring = self.parent.to_rational()
        x = GroupRingElement(ring, [Fraction(v) for v in self.coeffs])
        c = ring.monomial(c_elem)
        return (x - x * c) * Fraction(1, 2)

    def __eq__(self, other):
        if not isinstance(other, GroupRingElement):
            other = self._coerce(other)
        return [Fraction(a) for a in self.coeffs] == [Fraction(b) for b in other.coeffs]

    def __hash__(self):
        return hash(tuple(self.coeffs))

    def __repr__(self):
        parts = []
        for g, c in zip(self.parent.elements, self.coeffs):
            if c != 0:
                parts.append("%s*%s" % (c, list(g)))
        return "GRElt(%s)" % (" + ".join(parts) or "0")


class GroupRingIdeal:
    """Finitely generated ideal with lattice-backed membership testing."""

    def __init__(self, parent, generators, denominator=1):
        self.parent = parent
        self.generators = list(generators)
        self.denominator = denominator  # ideal = (1/denominator) * lattice span
        self._hnf = None

    @classmethod
    def from_rational_generators(cls, parent_z, gens):
        """Clear a common denominator from Q[G] generators -> fractional ideal."""
        den = 1
        for g in gens:
            for c in g.coeffs:
                c = Fraction(c)
                den = den * c.denominator // math.gcd(den, c.denominator)
        cleared = []
        for g in gens:
            cleared.append(GroupRingElement(
                parent_z, [int(Fraction(c) * den) for c in g.coeffs]))
        return cls(parent_z, cleared, denominator=den)

    def lattice(self):
        """HNF basis of the Z-span of all G-translates of the generators."""
        if self._hnf is None:
            rows = []
            ring = self.parent
            n = self.parent.modulus()
            for gen in self.generators:
                for g in ring.elements:
                    rows.append((gen * ring.monomial(g)).coeffs)
            if n is not None:
                for i in range(ring.size):
                    row = [0] * ring.size
                    row[i] = n
                    rows.append(row)
            self._hnf = hnf(rows) if rows else []
        return self._hnf

    def contains(self, elem, allow_denominator=None):
        """Membership of the exact value of elem in this (fractional) ideal.

        allow_denominator: a prime (typically 2) whose powers are invertible,
        for Z[1/2]-style membership.
        """
        return self._contains_vec([Fraction(c) for c in elem.coeffs],
                                  allow_denominator)

    def _contains_vec(self, vec, allow_denominator):
        target = [c * self.denominator for c in vec]
        h = self.lattice()
        if not h:
            return all(c == 0 for c in target)
        if all(c.denominator == 1 for c in target):
            if hnf_solve(h, [int(c) for c in target]) is not None:
                return True
        if allow_denominator is None:
            return False
        den = 1
        for c in target:
            den = den * c.denominator // math.gcd(den, c.denominator)
        rest = den
        while rest % allow_denominator == 0:
            rest //= allow_denominator
        if rest != 1:
            return False
        scaled = [int(c * den) for c in target]
        # x in L tensor Z[1/q] iff q^k x in L for some k; solve over Q and
        # check the denominators of the coordinates
        coords = _rational_coords(h, scaled)
        if coords is None:
            return False
        for c in coords:
            r = c.denominator * den
            while r % allow_denominator == 0:
                r //= allow_denominator
            if r != 1:
                return False
        return True

    def contains_ideal(self, other, allow_denominator=None):
        for g in other.generators:
            vec = [Fraction(c, other.denominator) for c in g.coeffs]
            if not self._contains_vec(vec, allow_denominator):
                return False
        return True

    def equals(self, other, allow_denominator=None):
        return (self.contains_ideal(other, allow_denominator=allow_denominator)
                and other.contains_ideal(self, allow_denominator=allow_denominator))

    def add(self, other):
        assert self.denominator == 1 and other.denominator == 1
        return GroupRingIdeal(self.parent, self.generators + other.generators)

    def multiply(self, other):
        assert self.denominator == 1 and other.denominator == 1
        gens = []
        for a in self.generators:
            for b in other.generators:
                gens.append(a * b)
        return GroupRingIdeal(self.parent, gens)

    def is_unit_ideal(self):
        one = self.parent.one() * self.denominator
        return self.contains(one * Fraction(1, self.denominator))

    def __repr__(self):
        return "GroupRingIdeal(%d gens, den=%d)" % (len(self.generators),
                                                    self.denominator)


def _rational_coords(h, target):
    """Coordinates of target over the HNF rows h, as exact rationals."""
    coords = []
    t = [Fraction(c) for c in target]
    for row in h:
        pivot = next((j for j, v in enumerate(row) if v != 0), None)
        if pivot is None:
            coords.append(Fraction(0))
            continue
        q = t[pivot] / row[pivot]
        coords.append(q)
        t = [a - q * b for a, b in zip(t, row)]
    if any(t):
        return None
    return coords


# ---------------------------------------------------------------------------
# Fitting ideals


def fitting_ideal(parent, matrix, i=0):
    """i-th Fitting ideal of the module presented by the matrix (rows map to
    relations): generated by all (n-i) x (n-i) minors, n the number of rows
    of the presentation's target (= len(matrix[0]) columns convention below).

    `matrix` is a list of rows of GroupRingElements, presenting the cokernel
    of the map with that matrix: R^m -> R^n -> X -> 0 where the matrix is
    n x m; pass it as n rows of length m.  For i >= n the ideal is the unit
    ideal (empty minors multiply to 1).
    """
    n = len(matrix)
    size = n - i
    if size <= 0:
        return GroupRingIdeal(parent, [parent.one()])
    if not matrix or size > len(matrix):
        return GroupRingIdeal(parent, [])
    m = len(matrix[0])
    if size > m:
        return GroupRingIdeal(parent, [parent.zero()])
    gens = []
    for rows in combinations(range(n), size):
        for cols in combinations(range(m), size):
            sub = [[matrix[r][c] for c in cols] for r in rows]
            gens.append(_det(parent, sub))
    return GroupRingIdeal(parent, gens)


def _det(parent, sub):
    n = len(sub)
    if n == 1:
        return sub[0][0]
    total = parent.zero()
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in sub[1:]]
        term = sub[0][j] * _det(parent, minor)
        total = total + term if j % 2 == 0 else total - term
    return total


# ---------------------------------------------------------------------------
# inertia data and the Sinnott-Kurihara / Atsuta-Kataoka ideals


@dataclass
class InertiaDatum:
    """Inertia subgroup, Frobenius coset representative, cyclic decomposition."""

    subgroup: list
    frobenius: tuple
    cyclic_generators: list
    label: str = ""

    @classmethod
    def from_subgroup(cls, group, subgroup, frobenius, label=""):
        subgroup = sorted(set(subgroup))
        gens = _cyclic_decomposition(group, subgroup)
        return cls(subgroup, frobenius, gens, label)

    def order(self):
        return len(self.subgroup)


def _cyclic_decomposition(group, subgroup):
    """Generators of cyclic factors J_1 x ... x J_s of the subgroup."""
    if len(subgroup) == 1:
        return []
    sub_set = list(subgroup)
    sub_group, dlog, lift = structure_from_generators(
        sub_set, group.op, group.identity())
    gens = []
    for basis_vec in sub_group.generators():
        word = lift(basis_vec)
        g = group.identity()
        for elem, e in zip(sub_set, word):
            g = group.op(g, group.pow(elem, e))
        gens.append(g)
    return gens


def inertia_data(rcg):
    """InertiaDatum for every prime dividing the conductor of the group.

    I_v is the kernel of the level map to the conductor with v removed; the
    Frobenius representative is any preimage of the Artin class of v at that
    level.  When removing v empties the conductor, the inertia is all of G
    and the Frobenius coset is G itself (narrow class number one).
    """
    from .rayclass import RayClassGroup
    ctx = rcg.ctx
    out = []
    for prime, e in rcg.conductor.factor():
        lower = rcg.conductor * prime.inverse() ** e
        if lower.is_unit_ideal():
            if ctx.fundamental_unit.norm() == 1:
                raise InvariantError("narrow class group must be trivial here")
            subgroup = list(rcg.group.elements())
            frob = rcg.group.identity()
        else:
            sub_rcg = RayClassGroup(ctx, lower)
            hom = rcg.hom_to(sub_rcg)
            subgroup = hom.kernel()
            target_cls = sub_rcg.class_of(prime)
            frob = next(x for x in rcg.group.elements() if hom(x) == target_cls)
        out.append(InertiaDatum.from_subgroup(rcg.group, subgroup, frob,
                                              label=prime.descriptor()))
    return out


def local_sku_factor(ring_q, datum):
    """(N I_v, 1 - sigma_v e_v) as a pair of Q[G] elements."""
    n_iv = ring_q.norm_element(datum.subgroup)
    e_v = n_iv * Fraction(1, len(datum.subgroup))
    one = ring_q.one()
    sigma = ring_q.monomial(datum.frobenius)
    return n_iv, one - sigma * e_v


def sku_ideal(theta_inf, inertia, check_integral=True):
    """Sinnott-Kurihara ideal (Theta^#_{S_inf, T}) prod_v (N I_v, 1 - sigma_v e_v).

    Expands the product into at most 2^(#ram) rational generators, verifies
    each lies in Z[G] (hard failure otherwise), and returns the Z[G]-ideal
    together with the verification record.
    """
    rcg = theta_inf.rcg
    group = rcg.group
    ring_q = GroupRing(group, "Q")
    ring_z = GroupRing(group, "Z")
    theta_sharp = ring_q.from_dict({cls: theta_inf.values[cls]
                                    for cls in group.elements()})
    gens = [theta_sharp]
    for datum in inertia:
        n_iv, other = local_sku_factor(ring_q, datum)
        gens = [g * n_iv for g in gens] + [g * other for g in gens]
    certificates = []
    integral_gens = []
    for g in gens:
        ok = g.is_integral()
        certificates.append(ok)
        if check_integral and not ok:
            raise InvariantError(
                "Sinnott-Kurihara generator falls outside Z[G]: %r" % g)
        integral_gens.append(GroupRingElement(ring_z, [int(Fraction(c)) for c in g.coeffs]))
    return GroupRingIdeal(ring_z, integral_gens), certificates


def relative_augmentation_ideal(ring_z, group, decomposition_subgroup):
    """ker(Z[G] -> Z[G/G_v]): generated by g - 1 for g in G_v."""
    gens = []
    one = ring_z.one()
    for g in decomposition_subgroup:
        if g != group.identity():
            gens.append(ring_z.monomial(g) - one)
    if not gens:
        gens = [ring_z.zero()]
    return GroupRingIdeal(ring_z, gens)


def ak_local_ideal(rcg_group, datum):
    """The explicit local ideal (N I_v, (1 - e_v sigma_v) * J) of the
    Atsuta-Kataoka theorem, as rational generators over Q[G].

    J = sum_i Z_i * I^(i-1) where Z_i is generated by products of s - i of
    the cyclic norm elements (indices nondecreasing, repetition allowed) and
    I is the relative augmentation ideal of the decomposition group.
    """
    group = rcg_group
    ring_q = GroupRing(group, "Q")
    ring_z = GroupRing(group, "Z")
    s = len(datum.cyclic_generators)
    n_iv = ring_z.norm_element(datum.subgroup)
    if s == 0:
        return [ring_q.one()], [n_iv.in_rational_ring()]
    norms = []
    for gen in datum.cyclic_generators:
        cyc = [group.pow(gen, k) for k in range(group.element_order(gen))]
        norms.append(ring_z.norm_element(cyc))
    dec_group = group.subgroup_span([datum.frobenius] + datum.cyclic_generators)
    aug = relative_augmentation_ideal(ring_z, group, dec_group)
    j_gens = []
    for i in range(1, s + 1):
        # Z_i: products of s - i norm elements, nondecreasing indices
        z_gens = []
        if s - i == 0:
            z_gens = [ring_z.one()]
        else:
            for combo in combinations_with_replacement(range(s), s - i):
                prod = ring_z.one()
                for idx in combo:
                    prod = prod * norms[idx]
                z_gens.append(prod)
        # multiply by I^(i-1)
        power_gens = [ring_z.one()]
        for _ in range(i - 1):
            power_gens = [a * b for a in power_gens for b in aug.generators]
        for zg in z_gens:
            for pg in power_gens:
                j_gens.append(zg * pg)
    e_v = ring_q.norm_element(datum.subgroup) * Fraction(1, len(datum.subgroup))
    front = ring_q.one() - e_v * ring_q.monomial(datum.frobenius)
    rational_gens = [n_iv.in_rational_ring()]
    for jg in j_gens:
        rational_gens.append(front * jg.in_rational_ring())
    return j_gens, rational_gens


class MinusQuotient:
    """Z[1/2][G]/(1 + c): coefficients on coset representatives of <c>."""

    def __init__(self, group, c_elem):
        if group.op(c_elem, c_elem) != group.identity():
            raise ValueError("conjugation must be an involution")
        if c_elem == group.identity():
            raise ValueError("conjugation must be nontrivial for a minus part")
        self.group = group
        self.c = c_elem
        reps = []
        seen = set()
        for g in sorted(group.elements()):
            if g in seen:
                continue
            reps.append(g)
            seen.add(g)
            seen.add(group.op(g, c_elem))
        self.reps = reps
        self.index = {g: i for i, g in enumerate(reps)}

    def project(self, elem):
        """Coefficient vector of the image of a (possibly rational) element."""
        out = [Fraction(0)] * len(self.reps)
        for g, coeff in zip(elem.parent.elements, elem.coeffs):
            c = Fraction(coeff)
            if c == 0:
                continue
            if g in self.index:
                out[self.index[g]] += c
            else:
                out[self.index[self.group.op(g, self.c)]] -= c
        return out

    def ideal_lattice(self, gens):
        """HNF lattice (scaled by a denominator) of the projected ideal."""
        rows = []
        den = 1
        vecs = []
        ring = gens[0].parent
        for gen in gens:
            for g in ring.elements:
                vec = self.project(gen * ring.monomial(g))
                vecs.append(vec)
                for c in vec:
                    den = den * c.denominator // math.gcd(den, c.denominator)
        for vec in vecs:
            rows.append([int(c * den) for c in vec])
        return hnf(rows), den

    def ideal_contains(self, gens, elem):
        """Membership of elem's image in the Z[1/2]-span of the ideal image."""
        h, den = self.ideal_lattice(gens)
        target = [c * den for c in self.project(elem)]
        tden = 1
        for c in target:
            tden = tden * c.denominator // math.gcd(tden, c.denominator)
        scaled = [int(c * tden) for c in target]
        coords = _rational_coords(h, scaled)
        if coords is None:
            return False
        for c in coords:
            r = c.denominator * tden
            while r % 2 == 0:
                r //= 2
            if r != 1:
                return False
        return True

    def ideals_equal(self, gens_a, gens_b):
        ring = gens_a[0].parent if gens_a else gens_b[0].parent
        return (all(self.ideal_contains(gens_b, g) for g in gens_a)
                and all(self.ideal_contains(gens_a, g) for g in gens_b))


def ideal_membership(x, ideal, allow_denominator=None):
    """x in I over Z[G] via Hermite normal form on the coefficient lattice."""
    if ideal.parent.ring == "Q":
        raise ValueError("clear denominators before membership testing")
    return ideal.contains(x, allow_denominator=allow_denominator)