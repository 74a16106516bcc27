"""Seeded Monte Carlo drivers and their report format.

Every experiment is a pure function of its ExperimentConfig: per-trial
randomness comes from the counter-based (seed, trial) streams, aggregation
is order-independent, and reports serialize to byte-identical CSV/JSON on
repeated runs (floats print as shortest round-trip decimals, there are no
timestamps).  Exit-code semantics for the CLI: every report carries a
``gates`` dict whose values must all be true for a run to "pass".
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, asdict

import numpy as np
from scipy.special import ndtri

from . import constants, rng
from .equilibrium import phi_cdf
from .measures import (EmpiricalMeasure, empirical_from_configuration,
                       measure_distance)
from .polynomials import Polynomial, sample_exponential_poly
from .rootfind import ConvergenceError, RootConfiguration, find_roots

VERSION = "0.1.0"


@dataclass(frozen=True)
class ExperimentConfig:
    """Common knobs for one experiment run.

    params holds experiment-specific thresholds and grids (e.g. B for the
    tail gate, delta for the annulus).  record_trials=None lets small runs
    keep per-trial rows and large runs drop them; the resolved choice is
    echoed into the report so reruns are unambiguous.
    """

    experiment: str
    n: int
    trials: int
    seed: int
    params: dict = field(default_factory=dict)
    tol: float = 1e-10
    record_trials: bool | None = None
    workers: int = 1
    out: str | None = None
    format: str = "json"

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.format not in ("json", "csv"):
            raise ValueError("format must be json or csv")

    def keep_rows(self) -> bool:
        if self.record_trials is None:
            return self.trials <= 10_000
        return self.record_trials


@dataclass
class ExperimentReport:
    """Per-trial rows plus aggregates, regenerable bit-exactly from config."""

    experiment: str
    config: dict
    version: str
    columns: list
    rows: list
    aggregates: dict
    gates: dict
    flags: dict

    def passed(self) -> bool:
        return all(self.gates.values())

    def to_json(self) -> str:
        doc = {"experiment": self.experiment, "config": self.config,
               "version": self.version, "columns": self.columns,
               "rows": self.rows, "aggregates": self.aggregates,
               "gates": self.gates, "flags": self.flags}
        return json.dumps(doc, sort_keys=True, allow_nan=True)

    def to_csv(self) -> str:
        buf = io.StringIO(newline="")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["# experiment", self.experiment])
        writer.writerow(["# version", self.version])
        writer.writerow(["# config", json.dumps(self.config, sort_keys=True)])
        for key in sorted(self.aggregates):
            writer.writerow(["# aggregate", key, repr(self.aggregates[key])])
        for key in sorted(self.gates):
            writer.writerow(["# gate", key, self.gates[key]])
        for key in sorted(self.flags):
            writer.writerow(["# flag", key, repr(self.flags[key])])
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([repr(v) if isinstance(v, float) else v
                             for v in row])
        return buf.getvalue()

    def render(self, fmt: str) -> str:
        return self.to_json() if fmt == "json" else self.to_csv()

    def write(self, path: str | None, fmt: str) -> str:
        text = self.render(fmt)
        if path:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        return text


def _config_echo(cfg: ExperimentConfig) -> dict:
    doc = asdict(cfg)
    doc["record_trials"] = cfg.keep_rows()
    return doc


def wilson_interval(successes: int, trials: int,
                    confidence: float = 0.99) -> tuple:
    """Wilson score interval; valid at zero successes."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    z = float(ndtri(0.5 + confidence / 2.0))
    phat = successes / trials
    denom = 1.0 + z * z / trials
    center = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials
                         + z * z / (4 * trials * trials)) / denom
    return max(0.0, center - half), min(1.0, center + half)


# ---------------------------------------------------------------------------
# the coefficient statistics
# ---------------------------------------------------------------------------

def xn_statistic(p: Polynomial) -> float:
    """Normalized log of p(1)/leading coefficient, from coefficients only.

    Equals (1/n^2) sum_i log|1 - z_i| by expanding p at 1; nonnegative for
    positive coefficients since their sum dominates the leading one.
    """
    c = p.coefficients
    n = p.degree
    return (math.log(float(np.sum(c))) - math.log(float(c[-1]))) / (n * n)


def xn_from_roots(cfg: RootConfiguration) -> float:
    """Root-route evaluation of the same statistic (dual-route check)."""
    roots = cfg.all_roots()
    return float(np.log(np.abs(1.0 - roots)).sum()) / (cfg.degree ** 2)


def yn_statistic(cfg: RootConfiguration) -> float:
    """Mean over roots (x 1/n) of |log|1-z|| truncated to |1-z| < 1."""
    roots = cfg.all_roots()
    logs = np.log(np.abs(1.0 - roots))
    return float(-logs[logs < 0].sum()) / cfg.degree


def joint_log_density(cfg: RootConfiguration) -> float:
    """Unnormalized log density of the zero vector on its stratum.

    Combinatorial prefactor log(2^k / (k! (n-2k)!)) plus the pairwise
    log-distance sum minus (n+1) times the log distances to 1.  Returns
    -inf when a root sits at 1 or two roots coincide; the normalization
    constant of the stratum is not included.
    """
    roots = cfg.all_roots()
    n = cfg.degree
    k = cfg.k
    ones = np.abs(1.0 - roots)
    if (ones == 0.0).any():
        return float("-inf")
    d = np.abs(roots[:, None] - roots[None, :])
    iu = np.triu_indices(n, 1)
    pair_dists = d[iu]
    if (pair_dists == 0.0).any():
        return float("-inf")
    prefactor = k * math.log(2.0) - math.lgamma(k + 1) - math.lgamma(n - 2 * k + 1)
    return (prefactor + float(np.log(pair_dists).sum())
            - (n + 1) * float(np.log(ones).sum()))


# ---------------------------------------------------------------------------
# experiment drivers
# ---------------------------------------------------------------------------

def xn_tail_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    """Exceedance frequency of the coefficient statistic against its cap.

    params: B (threshold).  The cap 20 n e^(-B n^2) is vacuous when >= 1;
    the run then carries a warning flag instead of a gate.
    """
    B = float(cfg.params["B"])
    n = cfg.n
    bound = 20.0 * n * math.exp(-B * n * n)
    exceed = 0
    rows = []
    keep = cfg.keep_rows()
    block = 4096
    for start in range(0, cfg.trials, block):
        m = min(block, cfg.trials - start)
        coeffs = rng.exponential_matrix(np.uint64(cfg.seed),
                                        np.uint64(rng.STREAM_COEFFS),
                                        np.uint64(start), m, n + 1)
        xn = (np.log(coeffs.sum(axis=1)) - np.log(coeffs[:, -1])) / (n * n)
        exceed += int((xn > B).sum())
        if keep:
            for t in range(m):
                rows.append([start + t, float(xn[t]), bool(xn[t] > B)])
    lo, hi = wilson_interval(exceed, cfg.trials)
    vacuous = bound >= 1.0
    aggregates = {"exceedances": exceed,
                  "frequency": exceed / cfg.trials,
                  "upper_99": hi,
                  "lower_99": lo,
                  "bound": bound}
    gates = {} if vacuous else {"tail_bound": hi <= bound}
    flags = {"vacuous_bound": vacuous}
    return ExperimentReport("xn-tail", _config_echo(cfg), VERSION,
                            ["trial", "xn", "exceeds"], rows,
                            aggregates, gates, flags)


def _trial_roots(n, seed, trial, tol):
    p = sample_exponential_poly(n, seed, trial)
    return find_roots(p, tol=tol)


def yn_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    """Max of the near-1 truncated log statistic over sampled trials."""
    rows = []
    worst = 0.0
    failures = 0
    keep = cfg.keep_rows()
    for t in range(cfg.trials):
        try:
            roots = _trial_roots(cfg.n, cfg.seed, t, cfg.tol)
        except ConvergenceError:
            failures += 1
            continue
        y = yn_statistic(roots)
        worst = max(worst, y)
        if keep:
            rows.append([t, y])
    cap = constants.YN_UNIVERSAL_BOUND + constants.YN_SMALL_N_SLACK
    aggregates = {"max_yn": worst, "cap": cap}
    return ExperimentReport("yn-max", _config_echo(cfg), VERSION,
                            ["trial", "yn"], rows, aggregates,
                            {"yn_cap": worst <= cap},
                            {"rootfind_failures": failures})


_CIRCLE_REFERENCE = None


def _circle_reference() -> EmpiricalMeasure:
    global _CIRCLE_REFERENCE
    if _CIRCLE_REFERENCE is None:
        k = 1024
        _CIRCLE_REFERENCE = EmpiricalMeasure(
            np.exp(1j * np.pi * (2 * np.arange(k) + 1) / k), symmetric=True)
    return _CIRCLE_REFERENCE


def _circle_trial(args):
    n, seed, trial, tol, delta = args
    try:
        roots = _trial_roots(n, seed, trial, tol)
    except ConvergenceError:
        return None
    mu = empirical_from_configuration(roots)
    moduli = np.abs(mu.atoms)
    annulus = float(((moduli >= 1 - delta) & (moduli <= 1 + delta)).mean())
    angles = np.mod(np.angle(mu.atoms), 2 * np.pi)
    sectors = np.histogram(angles, bins=16, range=(0.0, 2 * np.pi))[0] / n
    dist = measure_distance(mu, _circle_reference())
    return annulus, sectors, dist


def circle_convergence_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    """Annulus mass, 16-sector masses, and dictionary distance to the circle law.

    params: delta (annulus half-width).  Gates apply at the pilot
    configuration (n = 256, delta = 0.25); other configurations report
    diagnostics only.
    """
    delta = float(cfg.params.get("delta", constants.CIRCLE_PILOT_DELTA))
    args = [(cfg.n, cfg.seed, t, cfg.tol, delta) for t in range(cfg.trials)]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(_circle_trial, args, chunksize=8))
    else:
        results = [_circle_trial(a) for a in args]
    failures = sum(1 for r in results if r is None)
    kept = [r for r in results if r is not None]
    rows = []
    if cfg.keep_rows():
        for t, r in enumerate(results):
            if r is not None:
                rows.append([t, r[0], r[2]] + [float(s) for s in r[1]])
    annuli = np.array([r[0] for r in kept])
    dists = np.array([r[2] for r in kept])
    sectors = np.vstack([r[1] for r in kept])
    z99 = float(ndtri(0.995))
    m = len(kept)
    aggregates = {
        "trials_used": m,
        "annulus_mean": float(annuli.mean()),
        "annulus_ci_half": z99 * float(annuli.std(ddof=1)) / math.sqrt(m) if m > 1 else float("nan"),
        "distance_mean": float(dists.mean()),
        "distance_ci_half": z99 * float(dists.std(ddof=1)) / math.sqrt(m) if m > 1 else float("nan"),
        "sector_means": [float(v) for v in sectors.mean(axis=0)],
    }
    gates = {}
    if cfg.n == constants.CIRCLE_PILOT_N and delta == constants.CIRCLE_PILOT_DELTA:
        sector_dev = np.max(np.abs(sectors.mean(axis=0) - 1.0 / 16.0))
        gates = {
            "annulus_mass": aggregates["annulus_mean"] >= constants.CIRCLE_ANNULUS_MEAN_MIN,
            "sector_balance": bool(sector_dev <= constants.CIRCLE_SECTOR_HALF_BAND),
            "distance": aggregates["distance_mean"] <= constants.CIRCLE_DISTANCE_MEAN_MAX,
        }
    columns = ["trial", "annulus_mass", "distance"] + \
        [f"sector_{i}" for i in range(16)]
    return ExperimentReport("circle-convergence", _config_echo(cfg), VERSION,
                            columns, rows, aggregates, gates,
                            {"rootfind_failures": failures})


def _all_real_counts(cfg: ExperimentConfig) -> tuple:
    """(successes, failures): exact discriminant for n <= 3, roots beyond."""
    n = cfg.n
    successes = 0
    failures = 0
    if n == 1:
        return cfg.trials, 0
    if n in (2, 3):
        block = 65536
        for start in range(0, cfg.trials, block):
            m = min(block, cfg.trials - start)
            c = rng.exponential_matrix(np.uint64(cfg.seed),
                                       np.uint64(rng.STREAM_COEFFS),
                                       np.uint64(start), m, n + 1)
            if n == 2:
                disc = c[:, 1] ** 2 - 4.0 * c[:, 0] * c[:, 2]
            else:
                a, b, cc, d = c[:, 3], c[:, 2], c[:, 1], c[:, 0]
                disc = (18 * a * b * cc * d - 4 * b ** 3 * d
                        + b ** 2 * cc ** 2 - 4 * a * cc ** 3
                        - 27 * a ** 2 * d ** 2)
            successes += int((disc > 0).sum())
        return successes, 0
    for t in range(cfg.trials):
        try:
            roots = _trial_roots(n, cfg.seed, t, cfg.tol)
        except ConvergenceError:
            failures += 1
            continue
        if roots.k == 0:
            successes += 1
    return successes, failures


def all_real_probability(cfg: ExperimentConfig) -> ExperimentReport:
    """Estimate of the all-roots-real probability with a 99% Wilson interval.

    Exact coefficient discriminants decide n = 2, 3 (n = 1 is always
    real); larger n uses certified roots and the pairing tolerance.  The
    diagnostic -log2(p)/n^2 accompanies the estimate; no limit-value gate
    is asserted at desk scale.
    """
    if cfg.n > int(cfg.params.get("max_n", 8)):
        raise ValueError("all-real sampling is exponentially rare; n <= 8")
    successes, failures = _all_real_counts(cfg)
    trials = cfg.trials - failures
    phat = successes / trials if trials else float("nan")
    lo, hi = wilson_interval(successes, trials) if trials else (0.0, 1.0)
    diag = -math.log2(phat) / cfg.n ** 2 if 0 < phat else float("inf")
    aggregates = {"successes": successes,
                  "p_hat": phat,
                  "ci99_low": lo,
                  "ci99_high": hi,
                  "neglog2_rate": diag}
    flags = {"rootfind_failures": failures,
             "one_sided": successes == 0}
    return ExperimentReport("real-prob", _config_echo(cfg), VERSION,
                            ["successes", "trials"],
                            [[successes, trials]] if cfg.keep_rows() else [],
                            aggregates, {}, flags)


def conditioned_real_profile(cfg: ExperimentConfig) -> ExperimentReport:
    """Pooled all-real root sample versus the equilibrium law.

    Rejection-samples trials whose roots are all real (n <= 5), pools the
    roots, and reports the Kolmogorov-Smirnov distance to the equilibrium
    CDF plus the pooled median against the law's median -1.  Diagnostics
    only: desk-scale n cannot exhibit the limit, so no threshold is
    asserted.
    """
    if cfg.n > 5:
        raise ValueError("rejection sampling is infeasible beyond n = 5")
    n = cfg.n
    pooled = []
    accepted = 0
    failures = 0
    if n == 1:
        block = 65536
        for start in range(0, cfg.trials, block):
            m = min(block, cfg.trials - start)
            c = rng.exponential_matrix(np.uint64(cfg.seed),
                                       np.uint64(rng.STREAM_COEFFS),
                                       np.uint64(start), m, 2)
            pooled.append(-c[:, 0] / c[:, 1])
            accepted += m
    elif n in (2, 3):
        block = 65536
        for start in range(0, cfg.trials, block):
            m = min(block, cfg.trials - start)
            c = rng.exponential_matrix(np.uint64(cfg.seed),
                                       np.uint64(rng.STREAM_COEFFS),
                                       np.uint64(start), m, n + 1)
            if n == 2:
                disc = c[:, 1] ** 2 - 4.0 * c[:, 0] * c[:, 2]
            else:
                a, b, cc, d = c[:, 3], c[:, 2], c[:, 1], c[:, 0]
                disc = (18 * a * b * cc * d - 4 * b ** 3 * d
                        + b ** 2 * cc ** 2 - 4 * a * cc ** 3
                        - 27 * a ** 2 * d ** 2)
            good = np.nonzero(disc > 0)[0]
            accepted += good.size
            if n == 2:
                cg = c[good]
                sq = np.sqrt(disc[good])
                # stable quadratic roots: no cancellation in either root
                q = -0.5 * (cg[:, 1] + sq)
                pooled.append(q / cg[:, 2])
                pooled.append(cg[:, 0] / q)
            else:
                for t in good:
                    roots = find_roots(Polynomial(c[t]), tol=cfg.tol)
                    pooled.append(roots.reals)
    else:
        for t in range(cfg.trials):
            try:
                roots = _trial_roots(n, cfg.seed, t, cfg.tol)
            except ConvergenceError:
                failures += 1
                continue
            if roots.k == 0:
                accepted += 1
                pooled.append(roots.reals)
    flags = {"rootfind_failures": failures,
             "insufficient_data": accepted < 100}
    if accepted == 0:
        return ExperimentReport("conditioned", _config_echo(cfg), VERSION,
                                ["root"], [], {"accepted": 0}, {}, flags)
    roots = np.sort(np.concatenate(pooled))
    m = roots.size
    # KS distance of the pooled roots against the closed-form CDF
    cdf_vals = np.array([1.0 - phi_cdf(min(x, 0.0)) for x in roots])
    emp_hi = np.arange(1, m + 1) / m
    emp_lo = np.arange(0, m) / m
    ks = float(max(np.max(np.abs(emp_hi - cdf_vals)),
                   np.max(np.abs(emp_lo - cdf_vals))))
    aggregates = {"accepted": accepted,
                  "pooled_roots": m,
                  "ks_statistic": ks,
                  "ks_scale_99": 1.63 / math.sqrt(m),
                  "pooled_median": float(np.median(roots)),
                  "law_median": -1.0,
                  "max_root": float(roots.max())}
    rows = [[float(x)] for x in roots] if cfg.keep_rows() and m <= 10_000 else []
    gates = {"all_roots_negative": bool(roots.max() < 0.0)}
    return ExperimentReport("conditioned", _config_echo(cfg), VERSION,
                            ["root"], rows, aggregates, gates, flags)
