"""Command-line front end.

Exit codes: 0 success, 1 a theorem check printed FAIL, 2 invalid input,
3 numerical non-convergence.
"""
from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from . import __version__, io
from .chebyshev import RemezError, chebyshev_poly
from .measures import MeasureError, QuadratureError
from .orthopoly import RecurrenceError, recurrence
from .potential import (CriticalPointError, EquilibriumError, band_measures, critical_points,
                        equilibrium_measure, green, pw_sum, rational_dependence)
from .potential import to_dict as eq_to_dict
from .sets import SetValidationError
from .szego import (cantor_csv, cantor_study, circle_szego_limit, verify_lower_bound,
                    widom_condition_report, widom_interval_limit)
from .verify import SUITES, run_all

EXIT_OK, EXIT_FAIL, EXIT_INVALID, EXIT_NUMERIC = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_INVALID)


def _precision(args):
    env = os.environ.get("WIDOMLAB_PRECISION")
    if env:
        return int(env)
    return args.precision


def _meta(args, E=None, **extra):
    meta = {"version": __version__, "precision_digits": _precision(args), "seed": args.seed}
    if E is not None:
        meta["quadrature_orders"] = E.quadrature_orders
    meta.update(extra)
    return meta


def _config(args):
    return io.config_from_dict(io.read_json(args.config)) if getattr(args, "config", None) else None


def _load_set(args):
    cfg = _config(args)
    if args.set:
        return io.set_from_dict(io.read_json(args.set))
    if cfg is not None and cfg.set is not None:
        return io.set_from_dict(cfg.set)
    raise SetValidationError("a set file is required (--set)")


def _load_measure(args):
    cfg = _config(args)
    prec = _precision(args) if _precision(args) is not None else (cfg.precision if cfg else None)
    if getattr(args, "measure", None):
        return io.measure_from_dict(io.read_json(args.measure), prec)
    if getattr(args, "set", None):
        return io.measure_from_dict({"set": io.read_json(args.set)}, prec)
    if cfg is not None and cfg.measure is not None:
        return io.measure_from_dict(cfg.measure, prec)
    if cfg is not None and cfg.set is not None:
        return io.measure_from_dict({"set": cfg.set}, prec)
    raise MeasureError("a measure (--measure) or set (--set) file is required")


def _n(args, default=30):
    if args.n is not None:
        return args.n
    cfg = _config(args)
    return cfg.N if cfg is not None else default


def _emit(args, text):
    io.write_text(args.output, text)


def _json(args, payload, E=None, **extra):
    payload = dict(payload)
    payload["meta"] = _meta(args, E, **extra)
    _emit(args, io.dumps(payload))


# ---------------------------------------------------------------------------
# subcommands

def cmd_capacity(args):
    E = equilibrium_measure(_load_set(args), _precision(args))
    if args.format == "json":
        _json(args, {"capacity": E.capacity, "log_capacity": float(E.log_capacity)}, E)
    else:
        _emit(args, f"{E.capacity!r}\n")
    return EXIT_OK


def cmd_eqmeasure(args):
    E = equilibrium_measure(_load_set(args), _precision(args))
    if args.format == "csv":
        if E.set.is_circle:
            raise SetValidationError("the circle's equilibrium measure is d theta / 2 pi; use json")
        x = np.concatenate([np.linspace(float(b.lo), float(b.hi), args.points) for b in E.set.bands])
        rows = [[float(xi), float(d)] for xi, d in zip(x, E.density(x))]
        _emit(args, io.csv_text(["x", "density"], rows, _meta(args, E)))
    else:
        _json(args, eq_to_dict(E), E)
    return EXIT_OK


def cmd_green(args):
    E = equilibrium_measure(_load_set(args), _precision(args))
    pts = [complex(z.replace("i", "j")) if ("j" in z or "i" in z) else float(z) for z in args.z]
    vals = [float(green(E, z).value) for z in pts]
    if args.format == "json":
        _json(args, {"points": [io._num(z) for z in pts], "green": vals}, E)
    else:
        _emit(args, io.csv_text(["z", "green"], [[z, v] for z, v in zip(pts, vals)], _meta(args, E)))
    return EXIT_OK


def cmd_pwsum(args):
    E = equilibrium_measure(_load_set(args), _precision(args))
    crit = critical_points(E)
    total = float(pw_sum(E))
    if args.format == "json":
        _json(args, {"pw_sum": total, "critical_points": [float(c) for c in crit]}, E)
    else:
        _emit(args, f"{total!r}\n")
    return EXIT_OK


def cmd_bandmass(args):
    E = equilibrium_measure(_load_set(args), _precision(args))
    masses = band_measures(E)
    if args.format == "json":
        _json(args, {"band_masses": masses}, E)
    else:
        rows = [[j, float(b.lo), float(b.hi), m] for j, (b, m) in enumerate(zip(E.set.bands, masses))]
        _emit(args, io.csv_text(["band", "lo", "hi", "mass"], rows, _meta(args, E)))
    return EXIT_OK


def cmd_ratdep(args):
    E = equilibrium_measure(_load_set(args), _precision(args))
    rep = rational_dependence(E, args.height_bound)
    payload = {"found": rep.found, "witness": list(rep.witness) if rep.witness else None,
               "height_bound": rep.height_bound, "tolerance": rep.tolerance,
               "band_masses": list(E.band_masses)}
    _json(args, payload, E)
    return EXIT_OK


def cmd_widom(args):
    mu = _load_measure(args)
    res = recurrence(mu, _n(args, 16))
    meta = _meta(args, mu.base, measure_quadrature_order=mu.quadrature_order)
    if args.format == "json":
        payload = io.ortho_to_dict(res)
        payload["widom"] = [float(w) for w in res.widom]
        payload["condition_report"] = widom_condition_report(res.widom[1:])
        payload["meta"] = meta
        _emit(args, io.dumps(payload))
    else:
        _emit(args, io.ortho_csv(res, 1, meta))
    return EXIT_OK


def cmd_chebyshev(args):
    E = equilibrium_measure(_load_set(args), _precision(args))
    n_max = _n(args, 10)
    results = [chebyshev_poly(E, n) for n in range(1, n_max + 1)]
    if args.format == "json":
        _json(args, {"results": [io.chebyshev_to_dict(r) for r in results]}, E)
    else:
        _emit(args, io.chebyshev_csv(results, _meta(args, E)))
    return EXIT_OK


def _verdict_line(ok, text):
    return f"{'PASS' if ok else 'FAIL'} {text}\n"


def cmd_szego_bound(args):
    mu = _load_measure(args)
    rep = verify_lower_bound(mu, _n(args, 30))
    text = _verdict_line(rep.verdict, f"min_n W_n^2 = {rep.min_Wn_sq!r} (n = {rep.argmin_n}) vs e^M = "
                                      f"{rep.e_M!r}, M = {rep.M!r}, n <= {rep.n_range}")
    if args.format == "json":
        _json(args, {"report": rep.__dict__}, mu.base, measure_quadrature_order=mu.quadrature_order)
        print(text, end="", file=sys.stderr)
    else:
        _emit(args, text)
    return EXIT_OK if rep.verdict else EXIT_FAIL


def _limit_output(args, rep, E, label):
    if args.format == "json":
        _json(args, {"target": rep.target, "n": list(rep.n_values), "tail": list(rep.tail_values),
                     "achieved_rel_err": rep.achieved_rel_err, "monotone": rep.monotone}, E)
    else:
        lines = [f"# {label}: target {rep.target!r}, achieved relative error {rep.achieved_rel_err!r}, "
                 f"tail monotone {rep.monotone}\n"]
        _emit(args, "".join(lines) + io.csv_text(["n", "value"], list(zip(rep.n_values, rep.tail_values)),
                                                  _meta(args, E)))
    return EXIT_OK


def _density_input(args):
    data = io.read_json(args.measure) if args.measure else {}
    return data, io.density_from_dict(data.get("density"))


def cmd_circle_limit(args):
    data, w = _density_input(args)
    if data.get("set", {"kind": "circle"}).get("kind") != "circle":
        raise SetValidationError("circle-limit expects a circle measure file")
    rep = circle_szego_limit(w, _n(args, 64))
    return _limit_output(args, rep, equilibrium_measure(io.set_from_dict({"kind": "circle"})),
                         "||P_n||^2 against exp(int log w)")


def cmd_interval_limit(args):
    data, f = _density_input(args)
    K = io.set_from_dict(data.get("set", {"kind": "intervals", "bands": [[-1, 1]]}))
    if K.is_circle or K.n_bands != 1:
        raise SetValidationError("interval-limit expects a single interval")
    a, b = float(K.bands[0].lo), float(K.bands[0].hi)
    rep = widom_interval_limit(f, a, b, _n(args, 40))
    return _limit_output(args, rep, equilibrium_measure(K), "W_n^2 against 2 pi R(inf) Cap(K)")


def cmd_cantor_study(args):
    cfg = _config(args)
    m_max = args.m_max if args.m_max is not None else (cfg.m_max if cfg else 6)
    rows = cantor_study(m_max, _n(args, 30), args.which, _precision(args), args.workers)
    meta = _meta(args, measure=args.which, m_max=m_max)
    if args.format == "json":
        _json(args, {"rows": [{"m": r.m, "capacity": r.capacity, "log_capacity": r.log_capacity,
                               "pw_sum": r.pw_sum, "widom": list(r.widom), "min_widom": r.min_widom}
                              for r in rows], "heuristic_note": "tabulation only; no asymptotic claim"},
              measure=args.which, m_max=m_max)
    else:
        _emit(args, cantor_csv(rows, meta))
    return EXIT_OK


def cmd_verify_all(args):
    only = set(args.only) if args.only else None
    ok = True
    lines = [f"# widomlab {__version__} verify-all suite={args.suite} seed={args.seed} "
             f"precision={_precision(args)}\n"]
    out = sys.stdout if args.output in (None, "-") else None
    if out:
        out.write(lines[0])
    for res in run_all(args.seed, args.suite, args.workers, only):
        ok &= res.passed
        line = res.line() + "\n"
        lines.append(line)
        if out:
            out.write(line)
            out.flush()
    summary = f"{'PASS' if ok else 'FAIL'} summary: {sum(1 for l in lines if l.startswith('PASS'))}/" \
              f"{len(lines) - 1} criteria passed\n"
    lines.append(summary)
    if out:
        out.write(summary)
    else:
        io.write_text(args.output, "".join(lines))
    return EXIT_OK if ok else EXIT_FAIL


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision", type=int, default=None,
                        help="decimal digits for extended precision (default binary64; "
                             "WIDOMLAB_PRECISION overrides)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=["csv", "json"], default="csv")
    common.add_argument("--output", "-o", default=None, help="output path (default stdout)")
    common.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    common.add_argument("--config", default=None, help="experiment config JSON")

    p = _Parser(prog="widomlab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"widomlab {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, fn, helptext, set_arg=True, measure_arg=False, n_arg=False):
        sp = sub.add_parser(name, parents=[common], help=helptext, description=helptext)
        if set_arg:
            sp.add_argument("--set", default=None, help="set JSON file")
        if measure_arg:
            sp.add_argument("--measure", default=None, help="measure JSON file")
        if n_arg:
            sp.add_argument("--n", type=int, default=None, help="maximal degree")
        sp.set_defaults(func=fn)
        return sp

    add("capacity", cmd_capacity, "logarithmic capacity")
    sp = add("eqmeasure", cmd_eqmeasure, "equilibrium measure data (json) or sampled density (csv)")
    sp.add_argument("--points", type=int, default=101, help="samples per band for csv output")
    sp = add("green", cmd_green, "Green function values")
    sp.add_argument("--z", nargs="+", required=True, help="points, e.g. 2 or 0.5+1j")
    add("pwsum", cmd_pwsum, "sum of Green function values at critical points")
    add("bandmass", cmd_bandmass, "equilibrium band masses")
    sp = add("ratdep", cmd_ratdep, "search for rational dependence among band masses")
    sp.add_argument("--height-bound", type=int, default=20)
    add("widom", cmd_widom, "Widom factors W_n for n = 1..N", measure_arg=True, n_arg=True)
    add("chebyshev", cmd_chebyshev, "Chebyshev polynomials and M_n for n = 1..N", n_arg=True)
    add("szego-bound", cmd_szego_bound, "check min W_n^2 >= e^M", measure_arg=True, n_arg=True)
    add("circle-limit", cmd_circle_limit, "norms of a circle weight against exp(int log w)",
        set_arg=False, measure_arg=True, n_arg=True)
    add("interval-limit", cmd_interval_limit,
        "W_n^2 of f dx on one interval (density w.r.t. Lebesgue) against its limit",
        set_arg=False, measure_arg=True, n_arg=True)
    sp = add("cantor-study", cmd_cantor_study, "tabulate middle-thirds approximants", set_arg=False, n_arg=True)
    sp.add_argument("--m-max", type=int, default=None)
    sp.add_argument("--which", choices=["equilibrium", "cantor_lebesgue"], default="equilibrium")
    sp = add("verify-all", cmd_verify_all, "run the acceptance checks", set_arg=False)
    sp.add_argument("--suite", choices=sorted(SUITES), default="default")
    sp.add_argument("--only", type=int, nargs="*", help="criterion numbers to run")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (SetValidationError, MeasureError, ValueError, OSError, KeyError, TypeError) as exc:
        print(f"widomlab: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (QuadratureError, RemezError, RecurrenceError, CriticalPointError, EquilibriumError,
            ArithmeticError) as exc:
        print(f"widomlab: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


run = main
