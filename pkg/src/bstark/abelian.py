"""Finite abelian groups: structure from black-box generators, duals, subgroups.

A group is presented abstractly as `FiniteAbelianGroup(orders)` whose elements
are exponent tuples.  `structure_from_generators` turns any concretely
multiplied generating set (hashable elements, associative commutative op) into
such a presentation plus discrete-log and lifting maps, by walking the Cayley
graph and Smith-reducing the collected relation lattice.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from .intmat import smith_normal_form, solve_rational


class FiniteAbelianGroup:
    """Product of cyclic groups Z/orders[i]; elements are int tuples."""

    def __init__(self, orders):
        self.orders = tuple(int(o) for o in orders)
        if any(o < 1 for o in self.orders):
            raise ValueError("cyclic orders must be positive")

    @property
    def order(self):
        n = 1
        for o in self.orders:
            n *= o
        return n

    @property
    def exponent(self):
        e = 1
        for o in self.orders:
            e = e * o // _gcd(e, o)
        return e

    def identity(self):
        return (0,) * len(self.orders)

    def op(self, a, b):
        return tuple((x + y) % o for x, y, o in zip(a, b, self.orders))

    def inv(self, a):
        return tuple((-x) % o for x, o in zip(a, self.orders))

    def pow(self, a, k):
        return tuple((x * k) % o for x, o in zip(a, self.orders))

    def elements(self):
        return itertools.product(*(range(o) for o in self.orders))

    def element_index(self, a):
        idx = 0
        for x, o in zip(a, self.orders):
            idx = idx * o + (x % o)
        return idx

    def element_order(self, a):
        e = 1
        for x, o in zip(a, self.orders):
            if x:
                ox = o // _gcd(x, o)
                e = e * ox // _gcd(e, ox)
        return e

    def generators(self):
        gens = []
        for i, o in enumerate(self.orders):
            if o > 1:
                gens.append(tuple(1 if j == i else 0 for j in range(len(self.orders))))
        return gens

    def subgroup_span(self, elems):
        """All elements generated by `elems`, as a sorted list."""
        seen = {self.identity()}
        frontier = [self.identity()]
        while frontier:
            cur = frontier.pop()
            for g in elems:
                nxt = self.op(cur, g)
                if nxt not in seen:
                    seen.add(nxt)
                    frontier.append(nxt)
        return sorted(seen)

    def direct_product(self, other):
        return FiniteAbelianGroup(self.orders + other.orders)

    def __repr__(self):
        return "FiniteAbelianGroup(%s)" % (self.orders,)


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


class GroupHom:
    """Homomorphism between FiniteAbelianGroups, given by generator images."""

    def __init__(self, src, dst, images):
        self.src = src
        self.dst = dst
        # images[i] = image of the i-th coordinate generator of src
        self.images = list(images)
        for im, o in zip(self.images, src.orders):
            if dst.pow(im, o) != dst.identity():
                raise ValueError("generator image order does not divide source order")

    def __call__(self, a):
        out = self.dst.identity()
        for x, im in zip(a, self.images):
            out = self.dst.op(out, self.dst.pow(im, x))
        return out

    def kernel(self):
        return [a for a in self.src.elements() if self(a) == self.dst.identity()]

    def is_surjective(self):
        return len({self(a) for a in self.src.elements()}) == self.dst.order


def structure_from_generators(gens, op, identity):
    """Structure of the finite abelian group generated by `gens`.

    Elements must be hashable; `op` is the group law.  Returns
    (group, dlog, lift) where `group` is a FiniteAbelianGroup, `dlog` maps a
    concrete element to its exponent tuple, and `lift` maps an exponent tuple
    to integer exponents over `gens` (a representative word).
    """
    t = len(gens)
    if t == 0:
        group = FiniteAbelianGroup(())
        return group, lambda e: (), lambda a: []
    # BFS over the Cayley graph, collecting relation vectors
    table = {identity: tuple([0] * t)}
    frontier = [identity]
    relations = []
    while frontier:
        cur = frontier.pop()
        vec = table[cur]
        for i, g in enumerate(gens):
            nxt = op(cur, g)
            nvec = tuple(v + (1 if j == i else 0) for j, v in enumerate(vec))
            if nxt in table:
                rel = [a - b for a, b in zip(nvec, table[nxt])]
                if any(rel):
                    relations.append(rel)
            else:
                table[nxt] = nvec
                frontier.append(nxt)
    if not relations:
        raise ValueError("group is infinite or generators empty")
    d, _u, v = smith_normal_form(relations)
    rank = min(len(d), t)
    diag = [d[i][i] if i < len(d) and i < len(d[i]) else 0 for i in range(t)]
    if any(diag[i] == 0 for i in range(t)):
        raise ValueError("relation lattice not of full rank; group not finite?")
    keep = [i for i in range(t) if diag[i] > 1]
    orders = [diag[i] for i in keep]
    group = FiniteAbelianGroup(orders)

    # v_inv rows express the SNF coordinates in terms of original exponents
    v_inv = _unimodular_inverse(v)

    def dlog(elem):
        vec = table[elem]
        coords = [sum(vec[j] * v[j][i] for j in range(t)) for i in range(t)]
        return tuple(coords[i] % diag[i] for i in keep)

    def lift(a):
        full = [0] * t
        for pos, x in zip(keep, a):
            full[pos] = x
        word = [sum(full[i] * v_inv[i][j] for i in range(t)) for j in range(t)]
        return word

    return group, dlog, lift


def _unimodular_inverse(v):
    n = len(v)
    cols = []
    for j in range(n):
        e = [Fraction(1 if i == j else 0) for i in range(n)]
        col = solve_rational(v, e)
        cols.append([int(x) for x in col])
    return [[cols[j][i] for j in range(n)] for i in range(n)]
