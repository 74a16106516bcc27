#!/usr/bin/env python3
"""Regenerate the pilot observations behind src/exproots/constants.py.

Prints the observed statistics next to the stored gates.  Rerun after any
change to sampling or the root finder; if an observation drifts past its
gate, recalibrate the constant and record the new pilot config here.
"""

from exproots import constants
from exproots.classp import near_one_count_bound, near_one_tail
from exproots.experiments import (ExperimentConfig,
                                  circle_convergence_experiment, yn_statistic)
from exproots.measures import empirical_from_configuration, measure_distance
from exproots.polynomials import sample_exponential_poly
from exproots.rootfind import find_roots


def pilot_circle():
    cfg = ExperimentConfig("circle", constants.CIRCLE_PILOT_N, 100, 2024,
                           params={"delta": constants.CIRCLE_PILOT_DELTA},
                           record_trials=False)
    rep = circle_convergence_experiment(cfg)
    sector_dev = max(abs(s - 1 / 16) for s in rep.aggregates["sector_means"])
    print("[circle n=256 delta=0.25 trials=100 seed=2024]")
    print(f"  annulus mean   {rep.aggregates['annulus_mean']:.4f}"
          f"  (gate >= {constants.CIRCLE_ANNULUS_MEAN_MIN})")
    print(f"  sector dev     {sector_dev:.4f}"
          f"  (gate <= {constants.CIRCLE_SECTOR_HALF_BAND})")
    print(f"  distance mean  {rep.aggregates['distance_mean']:.4f}"
          f"  (gate <= {constants.CIRCLE_DISTANCE_MEAN_MAX})")


def pilot_independent_distance():
    worst = 0.0
    for seed in range(77, 77 + 40, 2):
        a = empirical_from_configuration(
            find_roots(sample_exponential_poly(256, seed)))
        b = empirical_from_configuration(
            find_roots(sample_exponential_poly(256, seed + 1)))
        worst = max(worst, measure_distance(a, b))
    print("[independent-sample distance n=256, 20 pairs, seeds 77..116]")
    print(f"  max distance   {worst:.4f}"
          f"  (gate <= {constants.INDEPENDENT_SAMPLE_DISTANCE_MAX})")


def pilot_near_one():
    worst = 0.0
    for seed in range(200):
        mu = empirical_from_configuration(
            find_roots(sample_exponential_poly(128, seed)))
        worst = max(worst, near_one_tail(mu, 5.0)[0])
    cap = near_one_count_bound(5.0)
    print("[near-1 mass n=128 M=5 trials=200 seeds 0..199]")
    print(f"  worst mass     {worst:.4f}  (count cap {cap:.4f} "
          f"+ slack {constants.NEAR_ONE_MASS_SLACK})")


def pilot_yn():
    worst = 0.0
    for seed in range(500):
        worst = max(worst, yn_statistic(
            find_roots(sample_exponential_poly(64, seed))))
    print("[Y_n n=64 trials=500 seeds 0..499]")
    print(f"  max Y_n        {worst:.4f}  (gate <= "
          f"{constants.YN_UNIVERSAL_BOUND} + {constants.YN_SMALL_N_SLACK})")


if __name__ == "__main__":
    pilot_circle()
    pilot_independent_distance()
    pilot_near_one()
    pilot_yn()
