"""Z-valued measures on O_p from smoothed Shintani zeta values.

mu_b(U) = zeta(b, U, D, 0) - ell * zeta(b*l^-1, U, D, 0).  Integrality of
every evaluated coset is enforced (a failure is an engine bug, per the
measure's defining theorem).  Tables over all residues mod p^m are built by
the bucketed zeta sweep, optionally across worker processes, with a
deterministic merge.
"""

from __future__ import annotations

import math

import numpy as np

from . import ENGINE_VERSION
from .cache import NullCache
from .errors import InvariantError
from .zeta import CongruenceCondition, shintani_zeta, zeta_residue_table


class MeasureContext:
    """Measure mu_b for a fixed ideal b coprime to conductor * l * p."""

    def __init__(self, ctx, conductor, p, ell_ideal, domain, b_ideal, cache=None,
                 workers=1):
        self.ctx = ctx
        self.conductor = conductor
        self.p = p
        self.ell_ideal = ell_ideal
        self.ell = int(ell_ideal.norm)
        self.domain = domain
        self.b_ideal = b_ideal
        self.partner = b_ideal * ell_ideal.inverse()
        self.cache = cache or NullCache()
        self.workers = workers
        from .field import IdealF
        if not b_ideal.is_coprime(conductor * ell_ideal):
            raise ValueError("b must be coprime to the conductor and l")
        if not b_ideal.is_coprime(IdealF(ctx, ctx.elem(p))):
            raise ValueError("b must be coprime to p")

    # -- single coset ------------------------------------------------------------

    def coset_zeta_pair(self, residue, level):
        cond = CongruenceCondition.coset(residue, level)
        z1 = shintani_zeta(self.b_ideal, cond, self.domain, self.conductor,
                           p=self.p, cache=self.cache)
        z2 = shintani_zeta(self.partner, cond, self.domain, self.conductor,
                           p=self.p, cache=self.cache)
        return z1, z2

    def measure_coset(self, residue, level):
        """mu_b(a + p^level O_p) as an exact integer."""
        z1, z2 = self.coset_zeta_pair(residue, level)
        val = z1 - self.ell * z2
        if val.denominator != 1:
            raise InvariantError(
                "measure of coset %s at level %d is not an integer: %s"
                % (residue, level, val))
        return int(val)

    def total_mass(self):
        """mu_b(O_p) = zeta(b, all) - ell * zeta(b l^-1, all)."""
        z1 = shintani_zeta(self.b_ideal, CongruenceCondition.all(), self.domain,
                           self.conductor, cache=self.cache)
        z2 = shintani_zeta(self.partner, CongruenceCondition.all(), self.domain,
                           self.conductor, cache=self.cache)
        val = z1 - self.ell * z2
        if val.denominator != 1:
            raise InvariantError("total mass is not an integer: %s" % val)
        return int(val)

    # -- full tables ---------------------------------------------------------------

    def measure_table(self, level):
        """MeasureTable of mu_b over all residues mod p^level (exact integers)."""
        t1, d1 = self._ideal_table(self.b_ideal, level)
        t2, d2 = self._ideal_table(self.partner, level)
        den = d1 * d2 // math.gcd(d1, d2)
        s1 = den // d1
        s2 = den // d2
        ell = self.ell
        bound = (max(map(abs, t1), default=0) * s1
                 + ell * max(map(abs, t2), default=0) * s2)
        if bound < (1 << 62) and den < (1 << 62):
            num = np.asarray(t1, dtype=np.int64) * s1
            num -= (ell * s2) * np.asarray(t2, dtype=np.int64)
            if np.any(num % den):
                raise InvariantError("non-integral measure value in table")
            values = (num // den).tolist()
        else:
            values = []
            for a, b in zip(t1, t2):
                v = a * s1 - ell * b * s2
                if v % den:
                    raise InvariantError("non-integral measure value in table")
                values.append(v // den)
        return MeasureTable(self, level, values)

    def _ideal_table(self, ideal, level):
        return zeta_residue_table(ideal, self.domain, self.conductor, self.p,
                                  level, cache=self.cache, workers=self.workers)

    def descriptor(self):
        return "mu[d=%d|cond=%s|b=%s|l=%s|D=%s|%s]" % (
            self.ctx.d, self.conductor.descriptor(), self.b_ideal.descriptor(),
            self.ell_ideal.descriptor(), self.domain.descriptor, ENGINE_VERSION)


class MeasureTable:
    """Exact integer measure values for every coset a + p^m O_p."""

    def __init__(self, mctx, level, values):
        self.mctx = mctx
        self.level = level
        self.big_p = mctx.p ** level
        self.values = values  # list indexed by x * p^m + y

    def value(self, residue):
        x, y = residue
        return self.values[(x % self.big_p) * self.big_p + (y % self.big_p)]

    def __call__(self, residue):
        return self.value(residue)

    def unit_sum(self):
        p = self.mctx.p
        total = 0
        for x in range(self.big_p):
            row = x * self.big_p
            xi = x % p
            for y in range(self.big_p):
                if xi or (y % p):
                    total += self.values[row + y]
        return total

    def full_sum(self):
        return sum(self.values)

    def exponent_array(self):
        arr = np.asarray(self.values, dtype=np.int64)
        return arr

    def export_text(self):
        """One record per coset: 'x y m value', sorted lexicographically."""
        lines = []
        for x in range(self.big_p):
            row = x * self.big_p
            for y in range(self.big_p):
                lines.append("%d %d %d %d" % (x, y, self.level, self.values[row + y]))
        return "\n".join(lines) + "\n"

    def perturbed(self, residue, delta=1):
        """Copy with one coset value changed (sabotage testing only)."""
        other = MeasureTable(self.mctx, self.level, list(self.values))
        x, y = residue
        other.values[(x % self.big_p) * self.big_p + (y % self.big_p)] += delta
        return other


