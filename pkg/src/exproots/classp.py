"""Numerical membership tests for the closure class of positive-coefficient
zero measures.

None of these produce proofs.  ``verified-outside`` always exhibits a
concrete violated inequality with its location; ``verified-inside`` is a
grid certificate at the declared resolution; anything weaker is
``inconclusive``.  Sign decisions about floating coefficients go through a
guard band so rounding noise is never converted into a verdict.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .measures import (EmpiricalMeasure, INCONCLUSIVE, VERIFIED_INSIDE,
                       VERIFIED_OUTSIDE, log_potential, log_potential_many)
from .polynomials import (ExactPolynomial, Polynomial,
                          all_coefficients_positive, monic_from_roots,
                          poly_multiply)

# resolution policy for grid certificates: below this, a clean scan is
# reported as inconclusive rather than verified-inside
MIN_RADII = 24
MIN_ANGLES = 48

SIGN_GUARD = 1e-10       # x max|coefficient|, for float sign decisions
OUTSIDE_TOL = 1e-9       # D > this certifies a violation


class PreconditionError(ValueError):
    """Theorem hypothesis violated (endpoint coefficients not positive)."""


class InconclusiveSignError(ArithmeticError):
    """A coefficient sits inside the sign guard band; no verdict issued."""


@dataclass(frozen=True)
class ConeSpec:
    """Closed symmetric cone around the positive reals, half-angle alpha."""

    alpha: float

    def __post_init__(self):
        if not 0.0 < self.alpha < math.pi:
            raise ValueError("half-angle must be in (0, pi)")


@dataclass(frozen=True)
class MembershipVerdict:
    """Outcome of a membership test battery.

    margin is the signed worst-case slack: positive means the tested
    inequalities held with that much room, negative quantifies the worst
    violation.  evidence carries per-test diagnostics; a verified-outside
    verdict always includes the violated inequality and its location.
    """

    verdict: str
    margin: float
    evidence: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.verdict not in (VERIFIED_INSIDE, VERIFIED_OUTSIDE, INCONCLUSIVE):
            raise ValueError(f"unknown verdict {self.verdict!r}")
        if self.verdict == VERIFIED_OUTSIDE and "violation" not in self.evidence:
            raise ValueError("verified-outside requires violation evidence")

    def to_json(self) -> str:
        return json.dumps({"verdict": self.verdict, "margin": self.margin,
                           "evidence": self.evidence}, sort_keys=True)


# ---------------------------------------------------------------------------
# cone bound
# ---------------------------------------------------------------------------

def obrechkoff_mass(mu: EmpiricalMeasure, cone: ConeSpec):
    """Atom mass of the cone |arg z| <= alpha against the 2 alpha / pi cap.

    Boundary atoms count as inside (conservative for the upper bound).
    Returns (mass, bound, ok).
    """
    args = np.abs(np.angle(mu.atoms))
    mass = float((args <= cone.alpha).mean())
    bound = 2.0 * cone.alpha / math.pi
    return mass, bound, mass <= bound + 1e-12


# ---------------------------------------------------------------------------
# near-1 logarithmic tails
# ---------------------------------------------------------------------------

def near_one_tail(mu: EmpiricalMeasure, M: float):
    """(mass, integral) of the region log|1-z| <= -M.

    mass is mu of the disc |1-z| <= e^-M; integral is the mean of
    |log|1-z|| over that region (so both compare against the same
    per-unit-mass budget).
    """
    if M <= 0:
        raise ValueError("M must be positive")
    logs = np.log(np.abs(1.0 - mu.atoms))
    inside = logs <= -M
    mass = float(inside.mean())
    integral = float(np.abs(logs[inside]).sum() / mu.size) if inside.any() else 0.0
    return mass, integral


def near_one_count_bound(M: float) -> float:
    """Asserted fraction cap 4 e^-M on the atom count of the near-1 region."""
    return 4.0 * math.exp(-M)


def near_one_budget(M: float) -> float:
    """Budget sum_{j >= M} j * 4 e^-j for the near-1 log integral.

    Closed form of the integer tail sum starting at j0 = ceil(M):
    sum_{j>=j0} j x^j = x^j0 (j0 - (j0-1) x) / (1-x)^2 with x = 1/e.
    """
    j0 = math.ceil(M)
    x = math.exp(-1.0)
    return 4.0 * x ** j0 * (j0 - (j0 - 1) * x) / (1.0 - x) ** 2


# ---------------------------------------------------------------------------
# radial-potential condition
# ---------------------------------------------------------------------------

def default_bes_grids(mu, radii: int = 48, angles: int = 96):
    """Log-spaced radii bracketing the support, angles in (0, pi]."""
    if isinstance(mu, EmpiricalMeasure):
        moduli = np.abs(mu.atoms)
        r_lo = max(float(moduli.min()) * 0.5, 1e-6)
        r_hi = float(moduli.max()) * 2.0 + 1e-6
    else:
        moduli = np.abs(mu.centroids)
        r_lo = max(float(moduli.min()) * 0.5, 1e-3)
        r_hi = float(moduli.max()) * 2.0
    radial = np.geomspace(r_lo, r_hi, radii)
    angular = np.linspace(0.0, np.pi, angles + 1)[1:]
    return radial, angular


def bes_condition(mu, radial_grid, angular_grid,
                  outside_tol: float = OUTSIDE_TOL,
                  margin_floor: float = 1e-9) -> MembershipVerdict:
    """Grid scan of D(r, theta) = L(r e^(i theta)) - L(r).

    The normalized potential's constant cancels in the difference, so the
    scan uses plain potentials.  theta = 0 (where D vanishes identically)
    is excluded.  Verdicts:

    * some D > outside_tol          -> verified-outside, with location;
    * max D < -margin_floor on a grid meeting the resolution policy
                                    -> verified-inside;
    * otherwise                     -> inconclusive (with a hint when the
                                      grid is below policy resolution).
    """
    radial = np.asarray(radial_grid, dtype=np.float64)
    angular = np.asarray(angular_grid, dtype=np.float64)
    angular = angular[np.abs(np.angle(np.exp(1j * angular))) > 1e-12]
    if radial.size == 0 or angular.size == 0:
        raise ValueError("empty scan grid")

    if isinstance(mu, EmpiricalMeasure):
        base = log_potential_many(mu, radial.astype(np.complex128))
        pts = radial[:, None] * np.exp(1j * angular)[None, :]
        vals = log_potential_many(mu, pts.ravel()).reshape(pts.shape)
    else:
        base = np.array([log_potential(mu, complex(r)) for r in radial])
        vals = np.empty((radial.size, angular.size))
        for i, r in enumerate(radial):
            for j, t in enumerate(angular):
                vals[i, j] = log_potential(mu, r * complex(math.cos(t),
                                                           math.sin(t)))
    with np.errstate(invalid="ignore"):
        D = vals - base[:, None]
    # -inf - -inf (z and r both atoms) cannot certify anything; drop it
    D = np.where(np.isnan(D), -np.inf, D)
    i, j = np.unravel_index(np.argmax(D), D.shape)
    worst = float(D[i, j])
    location = {"r": float(radial[i]), "theta": float(angular[j]),
                "D": worst}
    meets_policy = radial.size >= MIN_RADII and angular.size >= MIN_ANGLES
    if worst > outside_tol:
        return MembershipVerdict(VERIFIED_OUTSIDE, -worst,
                                 {"violation": location})
    evidence = {"worst": location,
                "grid": {"radii": int(radial.size),
                         "angles": int(angular.size)}}
    if worst < -margin_floor and meets_policy:
        return MembershipVerdict(VERIFIED_INSIDE, -worst, evidence)
    if not meets_policy:
        evidence["required_resolution"] = {"radii": MIN_RADII,
                                           "angles": MIN_ANGLES}
    return MembershipVerdict(INCONCLUSIVE, -worst, evidence)


# ---------------------------------------------------------------------------
# all-positive power tests
# ---------------------------------------------------------------------------

def _check_endpoints(coefficients) -> None:
    if not (coefficients[0] > 0 and coefficients[-1] > 0):
        raise PreconditionError("need positive constant and leading "
                                "coefficients")


def de_angelis_smallest_m(p: ExactPolynomial, m_max: int):
    """Smallest m <= m_max with all coefficients of p**m positive, or None.

    Exact arithmetic throughout; powers are accumulated incrementally so
    the scan stops at the first success.
    """
    _check_endpoints(p.coefficients)
    if m_max < 1:
        raise ValueError("m_max must be >= 1")
    power = p
    for m in range(1, m_max + 1):
        if m > 1:
            power = poly_multiply(power, p)
        if all_coefficients_positive(power):
            return m
    return None


def de_angelis_condition_iii(p: Polynomial, grid=None):
    """Sampled check of |p(z)| < p(|z|) off [0, inf) plus a_1, a_{d-1} > 0.

    The endpoint coefficient signs are compared exactly; the strict modulus
    inequality is sampled on (radii x angles), angles excluding 0 mod 2pi.
    Returns (ok, witness); witness reports the first grid violation (an
    equality within relative guard 1e-12 counts as a violation of
    strictness).
    """
    _check_endpoints(p.coefficients)
    c = p.coefficients
    d = p.degree
    witness = {}
    if d >= 2 and not (c[1] > 0 and c[d - 1] > 0):
        bad = "a_1" if not c[1] > 0 else f"a_{d-1}"
        witness["coefficient"] = bad
        witness["value"] = float(c[1] if bad == "a_1" else c[d - 1])
    if grid is None:
        radii = np.geomspace(1e-3, 1e3, 400)
        angles = np.linspace(0.0, 2.0 * np.pi, 181)[1:-1]
    else:
        radii, angles = grid
        radii = np.asarray(radii, dtype=np.float64)
        angles = np.asarray(angles, dtype=np.float64)
        angles = angles[np.abs(np.angle(np.exp(1j * angles))) > 1e-12]

    ref = np.zeros_like(radii)
    for a in c[::-1]:
        ref = ref * radii + a
    phases = np.exp(1j * angles)
    block = max(1, int(2e5 // max(angles.size, 1)))
    for start in range(0, radii.size, block):
        r = radii[start:start + block]
        z = r[:, None] * phases[None, :]
        vals = np.zeros_like(z)
        for a in c[::-1]:
            vals = vals * z + a
        mod = np.abs(vals)
        bad = mod >= ref[start:start + block, None] * (1.0 - 1e-12)
        if bad.any():
            i, j = np.argwhere(bad)[0]
            zz = z[i, j]
            witness["z"] = [float(zz.real), float(zz.imag)]
            witness["lhs"] = float(mod[i, j])
            witness["rhs"] = float(ref[start + i])
            return False, witness
    return (False, witness) if witness else (True, None)


def bnk_membership(cfg) -> bool:
    """Is the configuration the zero set of a positive-coefficient polynomial?

    Expands the monic polynomial from the roots in floats, lifts the
    expansion exactly to rationals, and checks strict positivity.  An
    exactly-zero coefficient is a definite failure; a nonzero coefficient
    inside the guard band (1e-10 x the coefficient scale) aborts with
    InconclusiveSignError instead of returning a verdict.
    """
    expansion = monic_from_roots(cfg.all_roots())
    coeffs = expansion.coefficients
    guard = SIGN_GUARD * float(np.max(np.abs(coeffs)))
    for c in coeffs:
        if c != 0.0 and abs(c) <= guard:
            raise InconclusiveSignError(
                f"coefficient {c!r} within guard band {guard:.3e} of zero")
    exact = ExactPolynomial.from_polynomial(expansion)
    return all_coefficients_positive(exact)


def de_angelis_corpus():
    """Fixed 50-polynomial exact corpus (degrees 2-8) for route-consistency
    checks: 26 with all-positive coefficients, 7 with zero gaps or negative
    entries that still admit an all-positive power (smallest m <= 4), and
    17 with parity, zero-coefficient, or sign obstructions that never do.
    """
    tuples = [
        # all-positive coefficients (their first power already qualifies)
        (1, 1, 1), (2, 1, 3), (1, 5, 2, 1), (3, 1, 1, 4), (1, 2, 3, 2, 1),
        (5, 1, 1, 1, 1, 5), (1, 3, 3, 1), (2, 2, 1, 1, 2),
        (1, 1, 2, 1, 1, 1, 1), (4, 1, 2, 2, 1, 3, 1, 2), (1, 6, 1),
        (3, 2, 5, 1, 2), (1, 1, 1, 1, 1, 1, 1, 1, 1), (2, 7, 1, 1),
        (1, 2, 1, 2, 1), (6, 1, 3, 1, 6), (1, 4, 4, 1),
        (2, 1, 1, 1, 1, 1, 2), (1, 9, 2, 4, 1), (7, 2, 1, 2, 7),
        (1, 1, 2, 1, 1), (1, 3, 2, 3, 1), (1, 1, 3, 2, 3, 1, 1),
        (1, 5, 3, 3, 5, 1), (1, 2, 1, 1, 2, 1), (1, 1, 1, 1, 1, 1),
        # gaps or negative entries, but some power is all-positive
        (1, 1, 0, 1, 1), (1, 1, 1, 0, 1, 1, 1), (1, 1, 1, 0, 0, 0, 1, 1, 1),
        (1, 4, -1, 4, 1), (1, 4, 0, 8, 0, 4, 1), (1, 3, -1, 3, 1),
        (2, 5, -1, 5, 2),
        # no power works: even gaps, zero coefficients next to the
        # endpoints, or sign patterns that survive every power
        (1, 0, 1), (1, 0, 0, 0, 1), (1, 0, 0, 0, 0, 0, 1),
        (1, 0, 0, 0, 0, 0, 0, 0, 1), (1, 0, 1, 0, 1), (1, 0, 2, 0, 1),
        (1, 0, 0, 2, 0, 0, 1), (1, -1, 1), (2, -3, 5), (1, 1, 0, 1),
        (2, 0, 3, 1), (3, 0, 0, 1), (1, -2, 0, 0, 1), (5, -1, 1, 1),
        (1, 1, 1, -1, 1), (1, 2, -5, 2, 1), (4, -4, 1),
    ]
    return [ExactPolynomial(t) for t in tuples]


# ---------------------------------------------------------------------------
# battery for the CLI
# ---------------------------------------------------------------------------

def membership_verdict(mu: EmpiricalMeasure, cone_angles=None,
                       tail_levels=(3.0, 5.0)) -> MembershipVerdict:
    """Combined verdict: cone bounds, near-1 tails, radial-potential scan."""
    if cone_angles is None:
        cone_angles = np.linspace(np.pi / 16, 15 * np.pi / 16, 15)
    evidence = {}
    worst_cone = math.inf
    for alpha in cone_angles:
        mass, bound, ok = obrechkoff_mass(mu, ConeSpec(float(alpha)))
        worst_cone = min(worst_cone, bound - mass)
        if not ok:
            evidence["violation"] = {"test": "cone-bound",
                                     "alpha": float(alpha),
                                     "mass": mass, "bound": bound}
            return MembershipVerdict(VERIFIED_OUTSIDE, bound - mass, evidence)
    evidence["cone_min_slack"] = worst_cone
    tails = {}
    for M in tail_levels:
        mass, integral = near_one_tail(mu, M)
        tails[str(M)] = {"mass": mass, "integral": integral,
                         "count_bound": near_one_count_bound(M),
                         "budget": near_one_budget(M)}
    evidence["near_one"] = tails
    scan = bes_condition(mu, *default_bes_grids(mu))
    evidence["radial_scan"] = json.loads(scan.to_json())
    if scan.verdict == VERIFIED_OUTSIDE:
        evidence["violation"] = scan.evidence["violation"] | {
            "test": "radial-potential"}
        return MembershipVerdict(VERIFIED_OUTSIDE, scan.margin, evidence)
    verdict = scan.verdict
    margin = min(scan.margin, worst_cone)
    return MembershipVerdict(verdict, margin, evidence)
