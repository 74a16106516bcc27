"""Command-line front end.

Every subcommand is a pure function of its flags: outputs echo the full
effective configuration, floats print as shortest round-trip decimals, and
rerunning a command reproduces its output byte for byte.  Exit codes:
0 = success / all gates pass, 1 = a gate failed, 2 = usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import classp, equilibrium
from .experiments import (VERSION, ExperimentConfig, all_real_probability,
                          circle_convergence_experiment,
                          conditioned_real_profile, xn_statistic,
                          xn_tail_experiment, yn_experiment)
from .measures import (empirical_from_configuration, measure_from_json,
                       rate_function)
from .polynomials import sample_exponential_poly
from .rootfind import ConvergenceError, find_roots

EXIT_OK = 0
EXIT_GATE = 1
EXIT_ERROR = 2


def _emit(doc: dict, args) -> None:
    text = json.dumps(doc, sort_keys=True)
    if args.format == "csv":
        lines = ["key,value"]
        flat = json.loads(text)

        def walk(prefix, node):
            if isinstance(node, dict):
                for k in sorted(node):
                    walk(f"{prefix}{k}." if prefix else f"{k}.", node[k]) \
                        if isinstance(node[k], (dict,)) else \
                        lines.append(f"{prefix}{k},{json.dumps(node[k])}")
            else:
                lines.append(f"{prefix[:-1]},{json.dumps(node)}")

        walk("", flat)
        text = "\n".join(lines) + "\n"
    else:
        text += "\n"
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _config_doc(args, keys) -> dict:
    return {k: getattr(args, k) for k in keys}


def _cmd_sample(args) -> int:
    p = sample_exponential_poly(args.n, args.seed, args.trial)
    _emit({"command": "sample", "version": VERSION,
           "config": _config_doc(args, ["n", "seed", "trial"]),
           "coefficients": [float(c) for c in p.coefficients]}, args)
    return EXIT_OK


def _cmd_roots(args) -> int:
    p = sample_exponential_poly(args.n, args.seed, args.trial)
    try:
        cfg = find_roots(p, tol=args.tol)
    except ConvergenceError as exc:
        _emit({"command": "roots", "error": str(exc)}, args)
        return EXIT_GATE
    _emit({"command": "roots", "version": VERSION,
           "config": _config_doc(args, ["n", "seed", "trial", "tol"]),
           "k": cfg.k,
           "pairs": [[z.real, z.imag] for z in cfg.pairs],
           "reals": [float(x) for x in cfg.reals],
           "backward_errors": [float(b) for b in cfg.backward_errors],
           "xn": xn_statistic(p)}, args)
    return EXIT_OK


def _measure_from_args(args):
    if args.measure:
        with open(args.measure) as fh:
            return measure_from_json(fh.read())
    p = sample_exponential_poly(args.n, args.seed, args.trial)
    return empirical_from_configuration(find_roots(p, tol=args.tol))


def _verdict_for(mu):
    """Full battery for atomic measures; radial scan alone for grids."""
    if hasattr(mu, "atoms"):
        return classp.membership_verdict(mu)
    return classp.bes_condition(mu, *classp.default_bes_grids(mu))


def _cmd_rate(args) -> int:
    mu = _measure_from_args(args)
    verdict = _verdict_for(mu)
    value = rate_function(mu, verdict)
    _emit({"command": "rate", "version": VERSION,
           "config": _config_doc(args, ["n", "seed", "trial", "tol", "measure"]),
           "verdict": verdict.verdict, "margin": verdict.margin,
           "rate": value if np.isfinite(value) else "inf"}, args)
    return EXIT_OK


def _cmd_check_p(args) -> int:
    mu = _measure_from_args(args)
    verdict = _verdict_for(mu)
    _emit({"command": "check-p", "version": VERSION,
           "config": _config_doc(args, ["n", "seed", "trial", "tol", "measure"]),
           "report": json.loads(verdict.to_json())}, args)
    return EXIT_OK


def _cmd_equilibrium(args) -> int:
    grid = np.geomspace(args.grid_lo, args.grid_hi, args.grid_points)
    residuals = [equilibrium.equilibrium_potential_residual(float(x), args.quad_tol)
                 for x in grid]
    var = equilibrium.variational_residual(0.5, grid, grid,
                                           quad_tol=args.quad_tol)
    rate = equilibrium.rate_at_equilibrium()
    doc = {"command": "equilibrium", "version": VERSION,
           "config": _config_doc(args, ["quad_tol", "grid_lo", "grid_hi",
                                        "grid_points"]),
           "C": var["C"],
           "max_residual": float(np.max(np.abs(residuals))),
           "min_slack": var["min_slack"],
           "I_R": rate["value"],
           "grid": {"points": args.grid_points,
                    "lo": args.grid_lo, "hi": args.grid_hi,
                    "linear_term": rate["linear_term"],
                    "energy": rate["energy"],
                    "value_err": rate["value_err"]}}
    _emit(doc, args)
    ok = doc["max_residual"] <= 1e-5 and abs(var["C"]) <= 1e-5 \
        and abs(rate["value"] - np.log(2.0)) <= 1e-3
    return EXIT_OK if ok else EXIT_GATE


def _experiment_config(args, name, params) -> ExperimentConfig:
    return ExperimentConfig(name, args.n, args.trials, args.seed,
                            params=params, tol=args.tol,
                            record_trials=args.record_trials,
                            workers=args.workers, out=args.out,
                            format=args.format)


def _run_report(report, args) -> int:
    text = report.write(args.out, args.format)
    if not args.out:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    return EXIT_OK if report.passed() else EXIT_GATE


def _cmd_ldp_stats(args) -> int:
    if args.kind == "xn-tail":
        cfg = _experiment_config(args, "xn-tail", {"B": args.B})
        return _run_report(xn_tail_experiment(cfg), args)
    if args.kind == "yn-max":
        cfg = _experiment_config(args, "yn-max", {})
        return _run_report(yn_experiment(cfg), args)
    cfg = _experiment_config(args, "circle", {"delta": args.delta})
    return _run_report(circle_convergence_experiment(cfg), args)


def _cmd_real_prob(args) -> int:
    cfg = _experiment_config(args, "real-prob", {})
    return _run_report(all_real_probability(cfg), args)


def _cmd_conditioned(args) -> int:
    cfg = _experiment_config(args, "conditioned", {})
    return _run_report(conditioned_real_profile(cfg), args)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="exproots",
        description="Random polynomials with exponential coefficients: "
                    "roots, potentials, rate values, membership checks, "
                    "and seeded Monte Carlo experiments.")
    parser.add_argument("--version", action="version", version=VERSION)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, n_default=8):
        p.add_argument("--n", type=int, default=n_default,
                       help="polynomial degree (default %(default)s)")
        p.add_argument("--seed", type=int, default=0,
                       help="64-bit master seed (default %(default)s)")
        p.add_argument("--trial", type=int, default=0,
                       help="trial index within the seed's stream "
                            "(default %(default)s)")
        p.add_argument("--tol", type=float, default=1e-10,
                       help="root backward-error tolerance (default %(default)s)")
        p.add_argument("--format", choices=("json", "csv"), default="json",
                       help="output format (default %(default)s)")
        p.add_argument("--out", default=None,
                       help="output path (default stdout)")

    p = sub.add_parser("sample", help="sample coefficient vectors")
    common(p)
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("roots", help="certified roots of a sampled polynomial")
    common(p)
    p.set_defaults(func=_cmd_roots)

    p = sub.add_parser("rate", help="rate-function value of a measure")
    common(p)
    p.add_argument("--measure", default=None,
                   help="measure JSON file (default: sampled empirical measure)")
    p.set_defaults(func=_cmd_rate)

    p = sub.add_parser("check-p", help="class membership test battery")
    common(p)
    p.add_argument("--measure", default=None,
                   help="measure JSON file (default: sampled empirical measure)")
    p.set_defaults(func=_cmd_check_p)

    p = sub.add_parser("equilibrium", help="equilibrium-law verification report")
    p.add_argument("--quad-tol", dest="quad_tol", type=float, default=1e-6,
                   help="quadrature tolerance (default %(default)s)")
    p.add_argument("--grid-lo", dest="grid_lo", type=float, default=1e-2,
                   help="low end of the residual grid (default %(default)s)")
    p.add_argument("--grid-hi", dest="grid_hi", type=float, default=1e2,
                   help="high end of the residual grid (default %(default)s)")
    p.add_argument("--grid-points", dest="grid_points", type=int, default=50,
                   help="residual grid size (default %(default)s)")
    p.add_argument("--format", choices=("json", "csv"), default="json",
                   help="output format (default %(default)s)")
    p.add_argument("--out", default=None, help="output path (default stdout)")
    p.set_defaults(func=_cmd_equilibrium)

    def experiment_common(p, n_default, trials_default):
        common(p, n_default=n_default)
        p.add_argument("--trials", type=int, default=trials_default,
                       help="Monte Carlo trials (default %(default)s)")
        p.add_argument("--workers", type=int,
                       default=int(os.environ.get("EXPROOTS_WORKERS", "1")),
                       help="worker processes; changes runtime only, never "
                            "output bytes (default %(default)s)")
        p.add_argument("--record-trials", dest="record_trials",
                       action=argparse.BooleanOptionalAction, default=None,
                       help="keep per-trial rows (default: auto by size)")

    p = sub.add_parser("ldp-stats",
                       help="tail and convergence statistics experiments")
    experiment_common(p, 6, 10000)
    p.add_argument("--kind", choices=("xn-tail", "yn-max", "circle"),
                   default="xn-tail", help="experiment (default %(default)s)")
    p.add_argument("--B", type=float, default=0.2,
                   help="tail threshold for xn-tail (default %(default)s)")
    p.add_argument("--delta", type=float, default=0.25,
                   help="annulus half-width for circle (default %(default)s)")
    p.set_defaults(func=_cmd_ldp_stats)

    p = sub.add_parser("real-prob", help="all-roots-real probability estimate")
    experiment_common(p, 2, 100000)
    p.set_defaults(func=_cmd_real_prob)

    p = sub.add_parser("conditioned",
                       help="conditioned-on-real root profile diagnostics")
    experiment_common(p, 2, 100000)
    p.set_defaults(func=_cmd_conditioned)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 0 for --help/--version, 2 for usage errors
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
