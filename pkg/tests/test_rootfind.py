import cmath

import mpmath
import numpy as np
import pytest

from exproots.polynomials import Polynomial, sample_exponential_poly
from exproots.rootfind import (AsymmetryError, ConvergenceError,
                               RootConfiguration, classify_conjugates,
                               find_roots)


def mp_backward_error(coeffs, z):
    """Independent extended-precision residual oracle."""
    with mpmath.workdps(50):
        zz = mpmath.mpc(z)
        p = mpmath.mpc(0)
        s = mpmath.mpf(0)
        az = abs(zz)
        for c in coeffs[::-1]:
            p = p * zz + mpmath.mpf(float(c))
            s = s * az + abs(mpmath.mpf(float(c)))
        return float(abs(p) / s)


def test_linear():
    cfg = find_roots(Polynomial([1.0, 1.0]))
    assert cfg.reals.tolist() == [-1.0]
    assert cfg.backward_errors[0] == 0.0


def test_cyclotomic():
    cfg = find_roots(Polynomial([1.0, 1.0, 1.0]))
    assert cfg.k == 1 and cfg.reals.size == 0
    assert cfg.pairs[0] == pytest.approx(cmath.exp(2j * cmath.pi / 3), abs=1e-12)


def test_sampled_backward_errors_certified():
    for n, seed, stride in ((50, 3, 1), (128, 1, 4), (256, 0, 8)):
        p = sample_exponential_poly(n, seed=seed)
        cfg = find_roots(p, tol=1e-10)
        assert (cfg.backward_errors <= 1e-10).all()
        # oracle: certificate values match mpmath re-evaluation within
        # a factor of 2 (subsampled at the larger degrees for speed)
        roots = np.concatenate([cfg.pairs, cfg.reals.astype(complex)])
        for z, be in list(zip(roots, cfg.backward_errors))[::stride]:
            true = mp_backward_error(p.coefficients, z)
            assert true <= 2.0 * max(be, 1e-18)
            if true > 1e-15:
                assert be <= 2.0 * true


def test_vieta_product_and_count():
    for seed, n in [(0, 12), (1, 33), (2, 64)]:
        p = sample_exponential_poly(n, seed)
        cfg = find_roots(p)
        roots = cfg.all_roots()
        assert roots.size == n
        prod = np.prod(np.abs(roots))
        expected = p.coefficients[0] / p.coefficients[-1]
        assert prod == pytest.approx(expected, rel=1e-8)


def test_no_nonnegative_real_roots_bulk():
    # positive coefficients exclude [0, inf); checked across degrees
    count = 0
    for n, seeds in [(4, 300), (16, 300), (64, 250), (256, 150)]:
        for seed in range(seeds):
            cfg = find_roots(sample_exponential_poly(n, seed), tol=1e-9)
            assert not (cfg.reals >= 0).any()
            count += 1
    assert count == 1000


def test_classify_trivials():
    cfg = classify_conjugates([1 + 1e-14j], pairing_tol=1e-9)
    assert cfg.reals.tolist() == [1.0] and cfg.k == 0
    cfg = classify_conjugates([2j, -2j, -3.0])
    assert cfg.pairs.tolist() == [2j] and cfg.reals.tolist() == [-3.0]


def test_classify_rejects_unpairable():
    with pytest.raises(AsymmetryError):
        classify_conjugates([1j, -2j])
    with pytest.raises(AsymmetryError):
        classify_conjugates([1j, 2j, -1j])


def test_roundtrip_reproduces_positive_coefficients():
    from exproots.polynomials import monic_from_roots

    p = sample_exponential_poly(12, seed=9)
    cfg = find_roots(p)
    monic = monic_from_roots(cfg.all_roots())
    rebuilt = monic.coefficients * p.coefficients[-1]
    assert np.allclose(rebuilt, p.coefficients, rtol=1e-6)


def test_configuration_invariants():
    with pytest.raises(ValueError):
        RootConfiguration(pairs=np.array([1j]), reals=np.array([]),
                          backward_errors=np.array([0.0]), degree=3)
    with pytest.raises(ValueError):
        RootConfiguration(pairs=np.array([1 - 1j]), reals=np.array([]),
                          backward_errors=np.array([0.0]), degree=2)


def test_convergence_error_carries_iterates():
    # an impossible tolerance must fail loudly with diagnostics attached
    p = sample_exponential_poly(32, seed=4)
    with pytest.raises(ConvergenceError) as err:
        find_roots(p, tol=1e-300, max_sweeps=8)
    assert err.value.best_roots.size == 32
    assert err.value.backward_errors.size == 32
