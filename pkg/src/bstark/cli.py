"""Batch front end: theta / unit / sku commands over a flat key=value config.

Reports are plain structured text with a stable field order and embed the
engine version plus the domain/shift/representative pinning data, so reruns
of an identical configuration are byte-identical regardless of worker count.
Timings go to stderr (they are not part of the report).

Exit codes: 0 success, 2 invalid configuration, 3 insufficient precision,
4 internal invariant violation.
"""

from __future__ import annotations

import argparse
import sys
import time
from fractions import Fraction

from . import ENGINE_VERSION
from .cache import DiskCache, NullCache
from .errors import ConfigError, InvariantError, PrecisionError
from .field import IdealF, make_field
from .groupring import (GroupRing, MinusQuotient, ak_local_ideal, inertia_data,
                        local_sku_factor, sku_ideal, ideal_membership)
from .measure import MeasureContext
from .pipeline import PipelineContext
from .rayclass import RayClassGroup, validate_config
from .zeta import (build_domain, canonical_shift, reverify_cached_value,
                   stickelberger, theta_s_infinity)

CONFIG_KEYS = ("d", "conductor", "p", "ell", "precision", "workers",
               "cache_dir", "out")


class RunConfig:
    def __init__(self, d, conductor, p, ell, precision=2, workers=1,
                 cache_dir=None, out=None):
        self.d = int(d)
        self.conductor_spec = str(conductor)
        self.p = int(p)
        self.ell = int(ell)
        self.precision = int(precision)
        self.workers = int(workers)
        self.cache_dir = cache_dir
        self.out = out

    def conductor_element(self, ctx):
        spec = self.conductor_spec
        if "," in spec:
            a, b = spec.split(",")
            return ctx.elem(int(a), int(b))
        return ctx.elem(int(spec))


def parse_config_file(path):
    values = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError("config line without '=': %r" % line)
            key, val = line.split("=", 1)
            key = key.strip()
            if key not in CONFIG_KEYS:
                raise ConfigError("unknown config key %r" % key)
            values[key] = val.strip()
    return values


def build_run_config(args):
    values = {}
    if args.config:
        values.update(parse_config_file(args.config))
    for key in CONFIG_KEYS:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    missing = [k for k in ("d", "conductor", "p", "ell") if k not in values]
    if missing:
        raise ConfigError("missing configuration keys: %s" % ", ".join(missing))
    values.setdefault("precision", "2")
    values.setdefault("workers", "1")
    return RunConfig(**values)


def _open_cache(cfg):
    return DiskCache(cfg.cache_dir) if cfg.cache_dir else NullCache()


def _header(cfg, command, extra=()):
    lines = [
        "bstark-report %s" % command,
        "engine %s" % ENGINE_VERSION,
        "d %d" % cfg.d,
        "conductor %s" % cfg.conductor_spec,
        "p %d" % cfg.p,
        "ell %d" % cfg.ell,
        "precision %d" % cfg.precision,
        "representatives canonical-minimal-height",
        "coset-representatives lexicographic",
    ]
    lines.extend(extra)
    return lines


def _emit(cfg, lines):
    text = "\n".join(lines) + "\n"
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    sys.stdout.write(text)


def _validated_context(cfg):
    ctx = make_field(cfg.d)
    conductor = IdealF(ctx, cfg.conductor_element(ctx))
    report = validate_config(ctx, conductor, cfg.p, cfg.ell)
    if not report.valid:
        raise ConfigError("; ".join(report.failures))
    return ctx, conductor, report


def cmd_theta(cfg):
    times = {}
    t0 = time.perf_counter()
    ctx, conductor, report = _validated_context(cfg)
    cache = _open_cache(cfg)
    rcg = RayClassGroup(ctx, conductor)
    domain, su = build_domain(ctx, conductor)
    times["setup"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    ell_ideal = ctx.primes_above(cfg.ell)[0]
    reps = rcg.class_representatives(conductor * ell_ideal *
                                     IdealF(ctx, ctx.elem(cfg.p)))
    theta = stickelberger(ctx, conductor, ell_ideal, cache=cache, rcg=rcg,
                          domain=domain, reps=reps)
    times["zeta"] = time.perf_counter() - t0
    reverify_cached_value(cache, ctx, conductor, domain, reps)

    lines = _header(cfg, "theta", [
        "domain %s" % domain.descriptor,
        "shintani-unit-index %d" % su.index,
        "group-order %d" % rcg.order,
        "group-orders %s" % (rcg.group.orders,),
    ])
    for cls in sorted(theta.values):
        lines.append("class %s rep %s zeta_ST %d" % (
            list(cls), reps[cls].descriptor(), theta.values[cls]))
    lines.append("check integrality PASS")
    lines.append("check augmentation-zero PASS")
    lines.append("check even-character-vanishing PASS")
    lines.append("check involution-annihilation PASS")
    lines.append("all checks passed")
    _emit(cfg, lines)
    _report_times(times)
    return 0


def cmd_unit(cfg):
    times = {}
    t0 = time.perf_counter()
    ctx, conductor, _report = _validated_context(cfg)
    cache = _open_cache(cfg)
    pctx = PipelineContext(ctx, conductor, cfg.p, cfg.ell, cache=cache,
                           workers=cfg.workers)
    times["setup"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    units = pctx.all_units(cfg.precision)
    times["measure"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    poly = pctx.bs_polynomial(cfg.precision)
    times["reconstruction"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    verification = pctx.verify_bs(poly, max(2, cfg.precision))
    times["verification"] = time.perf_counter() - t0
    reverify_cached_value(cache, ctx, conductor, pctx.domain, pctx.class_reps)

    lines = _header(cfg, "unit", [
        "domain %s" % pctx.domain.descriptor,
        "group-order %d" % pctx.rcg.order,
        "conjugation-class %s" % (list(pctx.conjugation),),
        "q-ideal %s" % pctx.q_ideal.descriptor(),
    ])
    for cls in sorted(units):
        u = units[cls]
        z = canonical_shift(ctx, pctx.class_reps[cls], conductor)
        lines.append("class %s rep %s z (%s,%s) exponent %d unit (%d,%d) mod %d^%d" % (
            list(cls), pctx.class_reps[cls].descriptor(), z.a, z.b,
            u.value.exponent, u.value.unit.x, u.value.unit.y, cfg.p, cfg.precision))
    lines.append("p-denominator-exponent %d" % poly.p_denominator)
    lines.append("polynomial %s" % poly.text())
    for entry in verification.entries:
        lines.append("predicate %s %s %s" % (
            entry["name"], "PASS" if entry["passed"] else "FAIL", entry["witness"]))
    _emit(cfg, lines)
    _report_times(times)
    return 0


def cmd_sku(cfg):
    times = {}
    t0 = time.perf_counter()
    ctx, conductor, _report = _validated_context(cfg)
    cache = _open_cache(cfg)
    rcg = RayClassGroup(ctx, conductor)
    ell_ideal = ctx.primes_above(cfg.ell)[0]
    times["setup"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    theta_inf = theta_s_infinity(ctx, conductor, ell_ideal, cache=cache, rcg=rcg)
    inertia = inertia_data(rcg)
    ideal, certificates = sku_ideal(theta_inf, inertia)
    theta = stickelberger(ctx, conductor, ell_ideal, cache=cache, rcg=rcg)
    ring_z = GroupRing(rcg.group, "Z")
    theta_sharp = ring_z.from_dict({c: int(v) for c, v in theta.values.items()})
    member = ideal_membership(theta_sharp, ideal)
    times["assembly"] = time.perf_counter() - t0

    lines = _header(cfg, "sku", [
        "group-order %d" % rcg.order,
    ])
    for cls in sorted(theta_inf.values):
        lines.append("theta-infinity %s %s" % (list(cls), theta_inf.values[cls]))
    for datum in inertia:
        lines.append("inertia %s order %d frobenius %s" % (
            datum.label, datum.order(), list(datum.frobenius)))
    for gen, cert in zip(ideal.generators, certificates):
        lines.append("generator %s integral %s" % (gen.coeffs, "PASS" if cert else "FAIL"))
    lines.append("theta-sharp-membership %s" % ("PASS" if member else "FAIL"))
    # s=1 degeneration comparison per ramified place
    ring_q = GroupRing(rcg.group, "Q")
    for datum in inertia:
        _jg, ak_gens = ak_local_ideal(rcg.group, datum)
        n_iv, other = local_sku_factor(ring_q, datum)
        if rcg.c_v1 == rcg.c_v2 and rcg.c_v1 != rcg.group.identity():
            mq = MinusQuotient(rcg.group, rcg.c_v1)
            same = mq.ideals_equal(ak_gens, [n_iv, other])
            verdict = "PASS" if same else "FAIL"
            if len(datum.cyclic_generators) > 1:
                verdict += " (s>1: strict refinement expected)"
        else:
            verdict = "SKIPPED (no unique conjugation)"
        lines.append("ak-degeneration %s %s" % (datum.label, verdict))
    _emit(cfg, lines)
    _report_times(times)
    return 0


def _report_times(times):
    for phase in sorted(times):
        sys.stderr.write("time %s %.3fs\n" % (phase, times[phase]))


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="bstark",
        description="Exact Brumer-Stark unit computations over real quadratic fields")
    parser.add_argument("command", choices=["theta", "unit", "sku"])
    parser.add_argument("--config", help="flat key=value configuration file")
    parser.add_argument("--d", type=int)
    parser.add_argument("--conductor", help="integer, or 'a,b' for a + b*w")
    parser.add_argument("--p", type=int)
    parser.add_argument("--ell", type=int)
    parser.add_argument("--precision", type=int)
    parser.add_argument("--workers", type=int)
    parser.add_argument("--cache_dir")
    parser.add_argument("--out")
    args = parser.parse_args(argv)
    try:
        cfg = build_run_config(args)
        if args.command == "theta":
            return cmd_theta(cfg)
        if args.command == "unit":
            return cmd_unit(cfg)
        return cmd_sku(cfg)
    except ConfigError as exc:
        sys.stderr.write("invalid configuration: %s\n" % exc)
        return 2
    except PrecisionError as exc:
        sys.stderr.write("insufficient precision: %s (raise the precision m)\n" % exc)
        return 3
    except InvariantError as exc:
        sys.stderr.write("internal invariant violation: %s\n" % exc)
        return 4


if __name__ == "__main__":
    sys.exit(main())
