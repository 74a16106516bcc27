import math

import numpy as np
import pytest
from scipy import integrate

from exproots import equilibrium as E


def test_density_values():
    assert E.phi_density(-1.0) == pytest.approx(1.0 / (2.0 * math.pi))
    assert E.phi_density(0.5) == 0.0
    assert E.phi_density(0.0) == 0.0


def test_density_integrates_to_one_with_tail():
    # quadrature with the t = sqrt(|x|) substitution removing the singularity:
    # mass of (-R, 0) plus the analytic tail equals 1
    R = 1e6
    val = integrate.quad(lambda t: 2.0 / (math.pi * (1.0 + t * t)),
                         0.0, math.sqrt(R), limit=200)[0]
    assert val + E.tail_mass(R) == pytest.approx(1.0, abs=1e-12)
    assert val == pytest.approx(1.0, abs=1e-3)  # tail ~ 2/(pi sqrt(R))


def test_tail_mass_bracket_and_positivity():
    for R in (100.0, 1e4, 1e6, 1e8):
        t = E.tail_mass(R)
        assert 2.0 / (math.pi * math.sqrt(R)) - 2.0 / (math.pi * R) <= t
        assert t <= 2.0 / (math.pi * math.sqrt(R))
        assert t > 0.0  # not compactly supported


def test_quantile_cdf_identity():
    assert E.phi_quantile(0.5) == pytest.approx(-1.0, rel=1e-12)
    for q in np.arange(0.01, 1.0, 0.01):
        assert E.phi_cdf(E.phi_quantile(float(q))) == pytest.approx(q, abs=1e-10)
    with pytest.raises(ValueError):
        E.phi_quantile(0.0)
    with pytest.raises(ValueError):
        E.phi_quantile(1.0)


def test_quantile_near_zero_support_endpoint():
    assert -1e-3 < E.phi_quantile(1e-3) < 0.0


def test_cdf_against_quadrature_oracle():
    for x in (-0.1, -1.0, -7.5, -200.0):
        oracle = integrate.quad(E.phi_density, x, 0.0,
                                points=[x / 2], limit=300)[0]
        assert E.phi_cdf(x) == pytest.approx(oracle, abs=1e-8)


def test_sample_ks_against_cdf():
    x = np.sort(E.phi_sample(1_000_000, seed=3))
    cdf = 1.0 - 2.0 / math.pi * np.arctan(np.sqrt(-x))
    n = x.size
    ks = max(np.max(np.abs(np.arange(1, n + 1) / n - cdf)),
             np.max(np.abs(np.arange(0, n) / n - cdf)))
    assert ks <= 0.002


def test_potential_identity_examples():
    # x = 0: integral of 2 log w / (1+w^2) vanishes by w -> 1/w symmetry
    assert E.equilibrium_potential_residual(0.0, 1e-6) == \
        pytest.approx(0.0, abs=1e-6)
    assert E.equilibrium_potential_residual(1.0, 1e-6) == \
        pytest.approx(0.0, abs=1e-6)
    for x in (0.1, 0.5, 2.0, 10.0, 100.0):
        assert abs(E.equilibrium_potential_residual(x, 1e-6)) <= 1e-5


def test_potential_identity_uniform_grid():
    worst = max(abs(E.equilibrium_potential_residual(float(x), 1e-6))
                for x in np.geomspace(1e-2, 1e2, 50))
    assert worst <= 1e-5


def test_variational_characterization():
    grid = np.geomspace(1e-2, 1e2, 50)
    rep = E.variational_residual(0.5, grid, grid)
    assert abs(rep["C"]) <= 1e-5
    assert rep["max_residual"] <= 1e-5
    assert rep["min_slack"] >= -1e-5


def test_variational_negative_control():
    # uniform law on [0, 1] must fail decisively (guards vacuous passes)
    def uniform01_potential(x):
        head = (1 - x) * math.log(abs(1 - x)) if x != 1.0 else 0.0
        return head + (x * math.log(x) if x > 0 else 0.0) - 1.0

    grid = np.geomspace(1e-2, 1e2, 50)
    rep = E.variational_residual(0.5, grid, grid,
                                 potential_fn=uniform01_potential)
    assert rep["max_residual"] > 0.1


def test_rate_terms_and_value():
    rep = E.rate_at_equilibrium()
    assert rep["linear_term"] == pytest.approx(2.0 * math.log(2.0), abs=1e-4)
    assert rep["energy"] == pytest.approx(2.0 * math.log(2.0), abs=1e-3)
    assert rep["value"] == pytest.approx(math.log(2.0), abs=1e-3)


def test_accuracy_error_signal():
    with pytest.raises(E.AccuracyError):
        E.equilibrium_potential_residual(1.0, quad_tol=1e-16)
