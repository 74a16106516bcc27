import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from exproots import measures as M
from exproots.polynomials import sample_exponential_poly
from exproots.rootfind import find_roots


def rotated_roots_of_unity(k):
    return np.exp(1j * np.pi * (2 * np.arange(k) + 1) / k)


# ---------------------------------------------------------------------------
# potentials
# ---------------------------------------------------------------------------

def test_potential_single_atom():
    assert M.log_potential(M.EmpiricalMeasure([0.0]), 2.0) == math.log(2.0)


def test_potential_uniform_circle_grid():
    c = M.circle_measure()
    # potential of the circle law is log_+|z| (mean-value property)
    assert M.log_potential(c, 2.0) == pytest.approx(math.log(2.0), abs=1e-6)
    assert M.log_potential(c, 0.5) == pytest.approx(0.0, abs=1e-6)
    assert M.log_potential(c, 1.0) == pytest.approx(0.0, abs=1e-6)


def test_potential_rotated_roots_closed_form():
    # prod |1 - z_j| = 2 for the k rotated roots of unity, so the potential
    # at 1 is log(2)/k; cross-checked by direct summation
    atoms = rotated_roots_of_unity(64)
    mu = M.EmpiricalMeasure(atoms, symmetric=True)
    direct = np.log(np.abs(1.0 - atoms)).sum() / 64
    value = M.log_potential(mu, 1.0)
    assert value == pytest.approx(math.log(2.0) / 64, abs=1e-13)
    assert value == pytest.approx(direct, abs=1e-15)


def test_potential_at_atom_is_minus_inf():
    assert M.log_potential(M.EmpiricalMeasure([1j, -1j]), 1j) == -math.inf


def test_conjugation_invariance_exact():
    p = sample_exponential_poly(24, seed=8)
    mu = M.empirical_from_configuration(find_roots(p))
    for z in (0.3 + 0.7j, -1.2 + 0.1j, 2.0 + 2.0j):
        assert M.log_potential(mu, z) == M.log_potential(mu, np.conj(z))


def test_normalized_potential():
    assert M.normalized_potential(M.EmpiricalMeasure([2.0]), 0.0) == \
        pytest.approx(0.0, abs=1e-15)
    # support inside the closed unit disc: normalization vanishes
    mu = M.EmpiricalMeasure([0.5j, -0.5j])
    assert M.normalized_potential(mu, 2.0) == M.log_potential(mu, 2.0)
    # hand evaluation: atoms {2, 1/2} at z = 1
    mu = M.EmpiricalMeasure([2.0, 0.5])
    assert M.normalized_potential(mu, 1.0) == pytest.approx(-math.log(2.0),
                                                            abs=1e-14)


def test_interval_potential_matches_quadrature_oracle():
    from scipy.integrate import quad

    seg = M.interval_measure(-2.0, -1.0)
    for z in (0.5, -1.5 + 0.3j, 3.0 + 1.0j):
        oracle = quad(lambda x: math.log(abs(complex(z) - x)), -2.0, -1.0,
                      limit=200)[0]
        assert M.log_potential(seg, z) == pytest.approx(oracle, abs=1e-9)


# ---------------------------------------------------------------------------
# energies
# ---------------------------------------------------------------------------

def test_energy_uniform_circle():
    assert M.log_energy(M.circle_measure()) == pytest.approx(0.0, abs=1e-6)


def test_energy_uniform_segment():
    # closed form -3/2; high-resolution quadrature oracle agrees
    seg = M.interval_measure(0.0, 1.0)
    assert M.log_energy(seg) == pytest.approx(-1.5, abs=1e-5)
    fine = M.interval_measure(0.0, 1.0, cells=4096)
    assert M.log_energy(fine) == pytest.approx(-1.5, abs=1e-7)


def test_energy_uniform_disc():
    # classical value -1/4; Monte Carlo pairwise oracle as cross-check
    disc = M.disc_measure()
    value = M.log_energy(disc)
    assert value == pytest.approx(-0.25, abs=1e-4)
    rng = np.random.default_rng(123)
    m = 400_000
    z = rng.uniform(-1, 1, (2 * m, 2)).view(complex).reshape(-1)
    z = z[np.abs(z) <= 1.0][: 2 * (m // 2)]
    a, b = z[: m // 2], z[m // 2: 2 * (m // 2)]
    mc = np.log(np.abs(a - b)).mean()
    sem = np.log(np.abs(a - b)).std() / math.sqrt(m // 2)
    assert value == pytest.approx(mc, abs=5 * sem)


def test_energy_uniform_square_closed_form():
    # geometric-mean-distance of the unit square: (1/3)ln 2 + pi/3 - 25/12
    sq = M.rect_measure(0.0, 1.0, 0.0, 1.0, lambda z: np.ones_like(z.real),
                        cells_per_side=48, subsample=4)
    closed = math.log(2.0) / 3 + math.pi / 3 - 25.0 / 12
    assert M.log_energy(sq) == pytest.approx(closed, abs=1e-6)


def test_energy_nonuniform_circle_fourier_oracle():
    # density (1 + 2a cos(m t))/2pi has energy -a^2/m: the circle log
    # kernel expands as -sum_k cos(k(t-s))/k, so only mode m survives
    for a, m in ((0.3, 2), (0.45, 1), (0.2, 5)):
        mu = M.circle_measure(
            density_fn=lambda t, a=a, m=m: (1 + 2 * a * math.cos(m * t))
            / (2 * math.pi))
        assert M.log_energy(mu) == pytest.approx(-a * a / m, abs=1e-9)


def test_potential_nonuniform_circle_quadrature_oracle():
    from scipy.integrate import quad

    a, m = 0.3, 2

    def density(t):
        return (1 + 2 * a * math.cos(m * t)) / (2 * math.pi)

    mu = M.circle_measure(density_fn=density)
    for z in (1.01 + 0.0j, 1.0 + 0.0j, 0.5 + 0.2j, 2.0 - 1.0j):
        oracle = quad(lambda t: density(t) * math.log(abs(
            z - complex(math.cos(t), math.sin(t)))), 0, 2 * math.pi,
            limit=400)[0]
        assert M.log_potential(mu, z) == pytest.approx(oracle, abs=1e-8)


def test_energy_requires_proxy_flag():
    mu = M.EmpiricalMeasure([1.0, 2.0])
    with pytest.raises(TypeError):
        M.log_energy(mu)
    proxy = M.EmpiricalMeasure([1.0, 2.0], continuous_proxy=True)
    assert M.log_energy(proxy) == M.discrete_log_energy(mu)


def test_discrete_energy_examples():
    assert M.discrete_log_energy(M.EmpiricalMeasure([1j, -1j])) == \
        pytest.approx(math.log(2.0) / 2, abs=1e-15)
    # k rotated roots of unity: prod_{j != i} |z_i - z_j| = k exactly
    k = 8
    mu = M.EmpiricalMeasure(rotated_roots_of_unity(k))
    direct = sum(math.log(abs(mu.atoms[i] - mu.atoms[j]))
                 for i in range(k) for j in range(k) if i != j) / k ** 2
    assert M.discrete_log_energy(mu) == pytest.approx(math.log(k) / k, abs=1e-12)
    assert M.discrete_log_energy(mu) == pytest.approx(direct, abs=1e-15)
    assert M.discrete_log_energy(M.EmpiricalMeasure([1.0, 2.0, 4.0])) == \
        pytest.approx(2.0 / 9.0 * math.log(6.0), abs=1e-15)


def test_discrete_energy_duplicate_sentinel():
    with pytest.warns(M.DuplicateAtomsWarning):
        out = M.discrete_log_energy(M.EmpiricalMeasure([1.0, 1.0]))
    assert out == -math.inf


def test_mutual_energy():
    e = math.e
    assert M.mutual_energy(M.EmpiricalMeasure([0.0]),
                           M.EmpiricalMeasure([e])) == pytest.approx(1.0)
    assert M.mutual_energy(M.EmpiricalMeasure([0.0]),
                           M.EmpiricalMeasure([1.0, e ** 2])) == \
        pytest.approx(1.0, abs=1e-14)
    assert M.mutual_energy(M.EmpiricalMeasure([1.0]),
                           M.EmpiricalMeasure([1.0])) == -math.inf


def test_mutual_energy_brute_force_and_symmetry():
    rng = np.random.default_rng(5)
    a = rng.uniform(-1, 1, 5) + 1j * rng.uniform(-1, 1, 5)
    b = rng.uniform(-1, 1, 7) + 1j * rng.uniform(-1, 1, 7)
    mu, nu = M.EmpiricalMeasure(a), M.EmpiricalMeasure(b)
    brute = sum(math.log(abs(x - y)) for x in a for y in b) / 35
    assert M.mutual_energy(mu, nu) == pytest.approx(brute, abs=1e-13)
    assert M.mutual_energy(mu, nu) == M.mutual_energy(nu, mu)


def test_inversion_energy_identity():
    # exact discrete identity, 100 random 50-atom measures
    rng = np.random.default_rng(7)
    for _ in range(100):
        z = rng.normal(size=50) * 2 + 1 + 1j * rng.normal(size=50)
        mu = M.EmpiricalMeasure(z)
        assert abs(M.inversion_energy_gap(mu)) <= 1e-10


# ---------------------------------------------------------------------------
# pair kernels
# ---------------------------------------------------------------------------

def test_pair_kernel_values():
    assert M.pair_kernel(0.0, 2.0) == pytest.approx(-math.log(2.0))
    assert M.pair_kernel(1 + 2j, 1 + 2j) == math.inf
    assert M.pair_kernel(1.0, 1.0) == math.inf  # diagonal convention, no NaN
    assert M.pair_kernel(1.0, 0.5) == -math.inf
    # conjugate pair at distance 4 with |1 - z| = 2 on both sides
    assert M.pair_kernel(1 + 2j, 1 - 2j) == pytest.approx(0.0, abs=1e-15)


def test_truncated_kernel():
    params = M.PairKernelParams(M=5.0)
    assert M.truncated_pair_kernel(1 + 2j, 1 - 2j, params) == \
        pytest.approx(0.0, abs=1e-15)
    assert M.truncated_pair_kernel(3.0, 3.0, params) == 5.0
    low = M.PairKernelParams(M=0.1)
    assert M.truncated_pair_kernel(0.0, 2.0, low) == \
        pytest.approx(-math.log(2.0))


@given(st.complex_numbers(max_magnitude=5, allow_nan=False,
                          allow_infinity=False),
       st.complex_numbers(max_magnitude=5, allow_nan=False,
                          allow_infinity=False),
       st.floats(0.1, 20.0))
@settings(max_examples=200, deadline=None)
def test_truncation_properties(z, w, level):
    params = M.PairKernelParams(M=level)
    f = M.pair_kernel(z, w)
    fm = M.truncated_pair_kernel(z, w, params)
    gm = M.pair_kernel_excess(z, w, params)
    assert fm <= level
    if f <= level:
        assert fm == f and gm == 0.0
    assert not math.isnan(fm)
    clipped = M.clipped_pair_kernel(z, w, params)
    assert clipped <= level and not math.isnan(clipped)


# ---------------------------------------------------------------------------
# rate function
# ---------------------------------------------------------------------------

def test_rate_uniform_circle_is_zero():
    assert M.rate_function(M.circle_measure(), M.VERIFIED_INSIDE) == \
        pytest.approx(0.0, abs=1e-6)


def test_rate_outside_is_infinite():
    assert M.rate_function(M.circle_measure(), M.VERIFIED_OUTSIDE) == math.inf


def test_rate_rotated_roots_closed_form():
    for k in (8, 64, 512):
        mu = M.EmpiricalMeasure(rotated_roots_of_unity(k))
        expected = math.log(2.0) / k - math.log(k) / (2.0 * k)
        assert M.rate_function(mu, M.INCONCLUSIVE) == \
            pytest.approx(expected, abs=1e-10)


def test_rate_split_and_pair_forms_agree():
    # uniform law on [-2, -1]: closed form for both routes,
    #   linear term = 3 log 3 - 2 log 2 - 1,  energy = log(length) - 3/2
    seg = M.interval_measure(-2.0, -1.0, cells=512)
    split = M.rate_function(seg, M.VERIFIED_INSIDE)
    closed = (3 * math.log(3.0) - 2 * math.log(2.0) - 1.0) + 0.75
    assert split == pytest.approx(closed, abs=1e-8)
    # the joint-kernel form, evaluated by an independent Monte Carlo mean
    # of f over i.i.d. pairs
    rng = np.random.default_rng(99)
    m = 2_000_000
    x = rng.uniform(-2.0, -1.0, m)
    y = rng.uniform(-2.0, -1.0, m)
    vals = (np.log(np.abs(1 - x)) + np.log(np.abs(1 - y))
            - np.log(np.abs(x - y)))
    pair_form = 0.5 * float(vals.mean())
    sem = 0.5 * float(vals.std()) / math.sqrt(m)
    assert split == pytest.approx(pair_form, abs=6 * sem)


def test_rate_nonnegative_on_sampled_degree_128():
    # the rate on sampled zero measures stays above the floor at the
    # largest degree of the invariant (the acceptance gate runs degree 64)
    from exproots.constants import RATE_NONNEG_FLOOR

    worst = math.inf
    for seed in range(100):
        mu = M.empirical_from_configuration(
            find_roots(sample_exponential_poly(128, seed)))
        worst = min(worst, M.rate_function(mu, M.INCONCLUSIVE))
    assert worst >= RATE_NONNEG_FLOOR


def test_rate_rejects_unknown_verdict():
    with pytest.raises(ValueError):
        M.rate_function(M.circle_measure(), "maybe")


# ---------------------------------------------------------------------------
# distance
# ---------------------------------------------------------------------------

def test_distance_axioms_and_continuity():
    mu = M.EmpiricalMeasure([0.2 + 0.1j, -1.0])
    assert M.measure_distance(mu, mu) == 0.0
    origin = M.EmpiricalMeasure([0.0])
    previous = math.inf
    for r in (0.5, 0.25, 0.1, 0.01):
        d = M.measure_distance(origin, M.EmpiricalMeasure([r + 0.0j]))
        assert d <= previous
        previous = d
    assert previous <= 0.011


def test_distance_between_independent_samples():
    from exproots.constants import INDEPENDENT_SAMPLE_DISTANCE_MAX

    mus = []
    for seed in (101, 202):
        cfg = find_roots(sample_exponential_poly(256, seed))
        mus.append(M.empirical_from_configuration(cfg))
    assert M.measure_distance(*mus) <= INDEPENDENT_SAMPLE_DISTANCE_MAX


# ---------------------------------------------------------------------------
# symmetric discretization
# ---------------------------------------------------------------------------

def test_discretize_real_segment():
    seg = M.interval_measure(-2.0, -1.0)
    nu = M.discretize_symmetric(seg, 200, seed=5)
    assert nu.size == 200
    assert (nu.atoms.imag > 0).sum() == 100
    assert (nu.atoms.imag < 0).sum() == 100
    assert np.allclose(np.abs(nu.atoms.imag), 2.0 / 200)
    assert nu.symmetric


def test_discretize_circle_energy_and_separation():
    from exproots.constants import DISCRETIZE_SIGMA_TOL

    law = M.circle_measure()
    for seed in range(3):
        nu = M.discretize_symmetric(law, 2000, seed=seed)
        assert abs(M.discrete_log_energy(nu)) <= DISCRETIZE_SIGMA_TOL
        d = np.abs(nu.atoms[:, None] - nu.atoms[None, :])
        np.fill_diagonal(d, np.inf)
        assert d.min() >= 1.0 / 2000 ** 2


def test_discretize_separation_across_sizes():
    law = M.circle_measure()
    for k in (64, 256, 1024):
        for seed in range(20):
            nu = M.discretize_symmetric(law, k, seed=seed)
            d = np.abs(nu.atoms[:, None] - nu.atoms[None, :])
            np.fill_diagonal(d, np.inf)
            assert d.min() >= 1.0 / k ** 2, (k, seed)


def test_discretize_requires_even_count():
    with pytest.raises(ValueError):
        M.discretize_symmetric(M.circle_measure(), 7, seed=0)


def test_discretize_planar_grid_measure():
    disc = M.disc_measure(cells_per_side=64, subsample=8)
    nu = M.discretize_symmetric(disc, 400, seed=9)
    assert nu.size == 400 and (nu.atoms.imag > 0).sum() == 200
    d = np.abs(nu.atoms[:, None] - nu.atoms[None, :])
    np.fill_diagonal(d, np.inf)
    assert d.min() >= 1.0 / 400 ** 2
    # discrete energy tracks the disc energy -1/4 up to the O(log k / k)
    # discretization bias
    assert M.discrete_log_energy(nu) == pytest.approx(-0.25, abs=0.05)


def test_discretize_separation_failure_signal():
    # support so tight that k/2 draws cannot stay k^-2 apart in 10 redraws
    sliver = M.interval_measure(-1.0 - 1e-12, -1.0)
    with pytest.raises(M.SeparationError):
        M.discretize_symmetric(sliver, 64, seed=0)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def test_json_roundtrip_empirical():
    mu = M.EmpiricalMeasure([0.5 + 1j, 0.5 - 1j], symmetric=True)
    text = M.measure_to_json(mu)
    doc = json.loads(text)
    assert doc["type"] == "empirical" and doc["atoms"] == [[0.5, 1.0], [0.5, -1.0]]
    back = M.measure_from_json(text)
    assert np.array_equal(back.atoms, mu.atoms) and back.symmetric


def test_json_roundtrip_grid():
    seg = M.interval_measure(-2.0, -1.0, cells=16)
    back = M.measure_from_json(M.measure_to_json(seg))
    assert back.kind == "interval"
    assert np.allclose(back.masses, seg.masses)
    assert M.log_potential(back, 0.5) == M.log_potential(seg, 0.5)


def test_grid_mass_invariant():
    with pytest.raises(ValueError):
        M.GridDensityMeasure(("interval", 0.0, 1.0), "cells-1d",
                             np.array([0.0, 1.0]), np.array([0.5]),
                             np.array([0.5]), np.array([0.5 + 0j]))
