#!/usr/bin/env python3
"""Run the full experiment battery at publication-scale settings.

Writes one report per experiment into the output directory (default
reports/) and exits nonzero if any gate fails.  Everything is a pure
function of the master seed, so reruns reproduce the reports byte for
byte.
"""

import argparse
import pathlib
import sys

from exproots.experiments import (ExperimentConfig, all_real_probability,
                                  circle_convergence_experiment,
                                  conditioned_real_profile,
                                  xn_tail_experiment, yn_experiment)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=20240601)
    parser.add_argument("--outdir", default="reports")
    parser.add_argument("--workers", type=int, default=1)
    args = parser.parse_args(argv)

    outdir = pathlib.Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    runs = [
        ("xn_tail_n6", xn_tail_experiment,
         ExperimentConfig("xn-tail", 6, 100_000, args.seed,
                          params={"B": 0.2}, record_trials=False)),
        ("xn_tail_n4", xn_tail_experiment,
         ExperimentConfig("xn-tail", 4, 100_000, args.seed,
                          params={"B": 0.3}, record_trials=False)),
        ("yn_max_n64", yn_experiment,
         ExperimentConfig("yn-max", 64, 500, args.seed)),
        ("circle_n256", circle_convergence_experiment,
         ExperimentConfig("circle", 256, 100, args.seed,
                          params={"delta": 0.25}, workers=args.workers)),
        ("real_prob_n2", all_real_probability,
         ExperimentConfig("real-prob", 2, 1_000_000, args.seed,
                          record_trials=False)),
        ("real_prob_n3", all_real_probability,
         ExperimentConfig("real-prob", 3, 1_000_000, args.seed,
                          record_trials=False)),
        ("real_prob_n4", all_real_probability,
         ExperimentConfig("real-prob", 4, 20_000, args.seed)),
        ("conditioned_n2", conditioned_real_profile,
         ExperimentConfig("conditioned", 2, 200_000, args.seed,
                          record_trials=False)),
    ]

    failed = []
    for name, runner, cfg in runs:
        report = runner(cfg)
        path = outdir / f"{name}.json"
        report.write(str(path), "json")
        status = "pass" if report.passed() else "FAIL"
        print(f"{name:16s} {status}  gates={report.gates}  -> {path}")
        if not report.passed():
            failed.append(name)
    if failed:
        print("gate failures:", ", ".join(failed))
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
