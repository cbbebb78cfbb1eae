"""Narrow ray class groups of real quadratic fields, Artin classes, config checks.

The group of conductor n (with both infinite places) is computed as the
quotient of (O/n)^* x {+-1}^2 by the images of -1 and the fundamental unit.
Classes are exponent tuples of a FiniteAbelianGroup; `class_of` realizes the
Artin map on ideals coprime to n via any generator's residue and signs.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from .abelian import FiniteAbelianGroup, GroupHom, structure_from_generators
from .cyclotomic import Cyclotomic
from .errors import ConfigError
from .field import IdealF, ResidueRing, is_rational_prime
from .intmat import smith_normal_form


class RayClassGroup:
    """Narrow ray class group of conductor n != (1) over a class number one field."""

    def __init__(self, ctx, conductor):
        if conductor.is_unit_ideal():
            raise ValueError("conductor must differ from (1)")
        if not conductor.is_integral():
            raise ValueError("conductor must be integral")
        self.ctx = ctx
        self.conductor = conductor
        self.ring = ResidueRing(ctx, conductor)

        units = self.ring.units()
        one = self.ring.reduce(ctx.one())
        identity = (one, 1, 1)

        def op(x, y):
            return (self.ring.mul(x[0], y[0]), x[1] * y[1], x[2] * y[2])

        # greedy generating set of (O/n)^* x {+-1}^2
        gens = [(one, -1, 1), (one, 1, -1)]
        span = self._span(gens, op, identity)
        for u in units:
            g = (u, 1, 1)
            if g not in span:
                gens.append(g)
                span = self._span(gens, op, identity)
        full_order = len(units) * 4
        assert len(span) == full_order, "unit enumeration inconsistent"

        gamma, dlog_gamma, _lift_gamma = structure_from_generators(gens, op, identity)
        self._gamma = gamma
        self._dlog_gamma = dlog_gamma
        self._gamma_op = op
        self._gamma_identity = identity

        eps0 = ctx.fundamental_unit
        img_minus1 = (self.ring.reduce(-ctx.one()), -1, -1)
        img_eps = (self.ring.reduce(eps0), eps0.sign_at(0), eps0.sign_at(1))
        self.unit_images = (img_minus1, img_eps)

        # quotient of gamma by the unit images, via SNF of the relation lattice
        r = len(gamma.orders)
        rel = [[gamma.orders[i] if j == i else 0 for j in range(r)] for i in range(r)]
        rel.append(list(dlog_gamma(img_minus1)))
        rel.append(list(dlog_gamma(img_eps)))
        if r == 0:
            self.group = FiniteAbelianGroup(())
            self._v = []
            self._diag = []
            self._keep = []
        else:
            d, _u, v = smith_normal_form(rel)
            diag = [d[i][i] for i in range(r)]
            assert all(x != 0 for x in diag), "ray class group must be finite"
            self._v = v
            self._diag = diag
            self._keep = [i for i in range(r) if diag[i] > 1]
            self.group = FiniteAbelianGroup([diag[i] for i in self._keep])

        self.order = self.group.order
        self.c_v1 = self._class_of_gamma((one, -1, 1))
        self.c_v2 = self._class_of_gamma((one, 1, -1))
        self.c_product = self.group.op(self.c_v1, self.c_v2)
        self._gen_reps = None

    @staticmethod
    def _span(gens, op, identity):
        seen = {identity}
        frontier = [identity]
        while frontier:
            cur = frontier.pop()
            for g in gens:
                nxt = op(cur, g)
                if nxt not in seen:
                    seen.add(nxt)
                    frontier.append(nxt)
        return seen

    # -- the Artin map ---------------------------------------------------------

    def _class_of_gamma(self, gamma_elem):
        vec = self._dlog_gamma(gamma_elem)
        r = len(vec)
        coords = [sum(vec[j] * self._v[j][i] for j in range(r)) for i in range(r)]
        return tuple(coords[i] % self._diag[i] for i in self._keep)

    def class_of_element(self, alpha):
        """Class of the principal ideal (alpha), alpha coprime to the conductor."""
        if alpha.is_zero():
            raise ValueError("zero element")
        residue = self.ring.reduce(alpha)
        if not self.ring.is_unit(residue):
            raise ValueError("element not coprime to the conductor")
        return self._class_of_gamma((residue, alpha.sign_at(0), alpha.sign_at(1)))

    def class_of(self, ideal):
        """Artin class of a fractional ideal coprime to the conductor."""
        try:
            return self.class_of_element(ideal.gen)
        except ValueError:
            raise ValueError("ideal not coprime to the conductor: %r" % (ideal,))

    def identity(self):
        return self.group.identity()

    def elements(self):
        return list(self.group.elements())

    # -- representatives and homomorphisms --------------------------------------

    def element_with(self, residue_pair, signs, search_radius=60):
        """An integral element congruent to `residue_pair` mod n with given signs."""
        base = self.ring.to_element(residue_pair)
        b0, b1 = [self.ctx.elem(Fraction(r[0]), Fraction(r[1]))
                  for r in self.conductor.basis]
        for radius in range(search_radius + 1):
            for i in range(-radius, radius + 1):
                for j in range(-radius, radius + 1):
                    if max(abs(i), abs(j)) != radius:
                        continue
                    cand = base + i * b0 + j * b1
                    if cand.is_zero():
                        continue
                    if cand.signs() == tuple(signs):
                        return cand
        raise AssertionError("no representative found; search radius too small")

    def generator_representatives(self):
        """One integral element per group generator, realizing its class."""
        if self._gen_reps is None:
            reps = []
            for gen in self.group.generators():
                gamma_elem = self._gamma_preimage(gen)
                reps.append(self.element_with(gamma_elem[0], (gamma_elem[1], gamma_elem[2])))
            self._gen_reps = reps
        return self._gen_reps

    def _gamma_preimage(self, cls):
        for gamma_elem in self._enumerate_gamma():
            if self._class_of_gamma(gamma_elem) == cls:
                return gamma_elem
        raise AssertionError("class without preimage; quotient map bug")

    def _enumerate_gamma(self):
        return self._span([g for g in self._all_gamma_gens()], self._gamma_op,
                          self._gamma_identity)

    def _all_gamma_gens(self):
        out = [(self.ring.reduce(self.ctx.one()), -1, 1),
               (self.ring.reduce(self.ctx.one()), 1, -1)]
        for u in self.ring.units():
            out.append((u, 1, 1))
        return out

    def hom_to(self, target):
        """Natural surjection onto the ray class group of a divisor conductor."""
        if not self.conductor.contains_ideal(target.conductor) and \
                not target.conductor.contains_ideal(self.conductor):
            raise ValueError("target conductor does not divide the source conductor")
        images = [target.class_of_element(rep) for rep in self.generator_representatives()]
        hom = GroupHom(self.group, target.group, images)
        assert hom.is_surjective(), "level map must be onto"
        return hom

    def class_representatives(self, coprime_to, norm_bound=2000):
        """First integral ideal per class, coprime to `coprime_to`, by (norm, gen)."""
        from .field import ideals_of_norm
        reps = {}
        n = 1
        while len(reps) < self.order and n <= norm_bound:
            for ideal in ideals_of_norm(self.ctx, n):
                if not ideal.is_coprime(coprime_to):
                    continue
                cls = self.class_of(ideal)
                if cls not in reps:
                    reps[cls] = ideal
            n += 1
        if len(reps) < self.order:
            raise ConfigError("could not find class representatives below norm %d" % norm_bound)
        return reps

    def first_ideal_in_class(self, cls, coprime_to, norm_bound=2000):
        from .field import ideals_of_norm
        n = 1
        while n <= norm_bound:
            for ideal in ideals_of_norm(self.ctx, n):
                if ideal.is_coprime(coprime_to) and self.class_of(ideal) == cls:
                    return ideal
            n += 1
        raise ConfigError("no ideal of class %s coprime to %s below norm %d"
                          % (cls, coprime_to.descriptor(), norm_bound))

    # -- characters --------------------------------------------------------------

    def characters(self):
        """All characters, as ClassCharacter objects over Q(zeta_exponent)."""
        e = self.group.exponent if self.group.orders else 1
        chars = []
        for tup in self.group.elements():
            chars.append(ClassCharacter(self, tup, e))
        return chars

    def __repr__(self):
        return "RayClassGroup(conductor=%s, orders=%s)" % (
            self.conductor.descriptor(), self.group.orders)


class ClassCharacter:
    """Character of a narrow ray class group, valued in Q(zeta_e)."""

    def __init__(self, rcg, exponents, e):
        self.rcg = rcg
        self.exponents = exponents
        self.e = max(e, 1)

    def __call__(self, cls):
        tot = 0
        for a, v, o in zip(cls, self.exponents, self.rcg.group.orders):
            tot += a * v * (self.e // o)
        return Cyclotomic.zeta_power(self.e, tot % self.e)

    def inverse(self):
        g = self.rcg.group
        return ClassCharacter(self.rcg, g.inv(self.exponents), self.e)

    def is_trivial_on(self, cls):
        return self(cls) == Cyclotomic.rational(self.e, 1)

    def is_totally_odd(self):
        minus_one = Cyclotomic.rational(self.e, -1)
        return self(self.rcg.c_v1) == minus_one and self(self.rcg.c_v2) == minus_one

    def order(self):
        return self.rcg.group.element_order(self.exponents)

    def kernel(self):
        one = Cyclotomic.rational(self.e, 1)
        return [c for c in self.rcg.group.elements() if self(c) == one]

    def __repr__(self):
        return "ClassCharacter(%s over %s)" % (self.exponents, self.rcg.group.orders)


@dataclass
class ConfigReport:
    """Outcome of validate_config: named failures plus conjugation data."""

    valid: bool
    failures: list
    d: int
    conductor: str
    p: int
    ell: int
    c_v1: tuple = None
    c_v2: tuple = None
    c_product: tuple = None
    conjugation: tuple = None
    notes: list = dc_field(default_factory=list)

    def summary(self):
        lines = ["config %s" % ("VALID" if self.valid else "INVALID")]
        for f in self.failures:
            lines.append("  failed: %s" % f)
        for n in self.notes:
            lines.append("  note: %s" % n)
        return "\n".join(lines)


def validate_config(ctx, conductor, p, ell_ideal):
    """Check the arithmetic preconditions of the p-adic pipeline.

    ell_ideal may be an IdealF or a rational prime ell (its smallest degree-one
    prime is then taken).  Every failed check is reported by name.
    """
    failures = []
    notes = []
    ell = 0
    if isinstance(ell_ideal, int):
        ell = ell_ideal
        if not is_rational_prime(ell):
            failures.append("ell=%d is not prime" % ell)
            ell_ideal = None
        else:
            if ell <= 3:
                failures.append("ell=%d must exceed n+1 = 3 (so ell >= 5)" % ell)
            if ctx.split_type(ell) == "inert":
                failures.append("ell=%d is inert in F, no degree-one prime above it" % ell)
                ell_ideal = None
            else:
                ell_ideal = ctx.primes_above(ell)[0]
    elif isinstance(ell_ideal, IdealF):
        ell = int(ell_ideal.norm)
        if not is_rational_prime(ell):
            failures.append("N(l) = %d is not a rational prime (l must have degree one)" % ell)
        elif ell <= 3:
            failures.append("N(l) = %d must exceed n+1 = 3 (so ell >= 5)" % ell)
    if isinstance(ell_ideal, IdealF) and not ell_ideal.is_coprime(conductor):
        failures.append("l shares a factor with the conductor")

    if conductor.is_unit_ideal():
        failures.append("conductor must differ from (1)")
    if not conductor.is_integral():
        failures.append("conductor must be integral")

    if p % 2 == 0 or not is_rational_prime(p):
        failures.append("p=%d must be an odd prime" % p)
    else:
        if ctx.split_type(p) != "inert":
            failures.append("p=%d is %s in F, but must be inert" % (p, ctx.split_type(p)))
        if not conductor.contains(ctx.elem(p - 1)):
            failures.append("p=%d is not congruent to 1 mod the conductor" % p)
        p_ideal = IdealF(ctx, ctx.elem(p))
        if not p_ideal.is_coprime(conductor):
            failures.append("(p) must avoid S: p divides the conductor")
        if ell and p == ell:
            failures.append("(p) must avoid T: p equals ell")

    report = ConfigReport(valid=not failures, failures=failures, d=ctx.d,
                          conductor=conductor.descriptor(), p=p, ell=ell)
    if not failures:
        rcg = RayClassGroup(ctx, conductor)
        report.c_v1 = rcg.c_v1
        report.c_v2 = rcg.c_v2
        report.c_product = rcg.c_product
        if rcg.c_v1 == rcg.c_v2:
            report.conjugation = rcg.c_v1
        else:
            report.conjugation = rcg.c_product
            notes.append("archimedean involutions differ; the ray class field is "
                         "not CM and the product class is used as conjugation")
        report.notes = notes
    return report
