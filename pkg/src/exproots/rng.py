"""Counter-based random number generation for reproducible Monte Carlo.

Every random quantity in this package is a pure function of
(master seed, stream id, trial index, draw index), realized through the
Philox-4x64-10 counter-based generator.  Trials can therefore be computed
in any order, on any number of workers, with bit-identical results.

Layout of the 256-bit Philox counter and 128-bit key:

    counter = (block, trial, 0, 0)      block = draw_index // 4
    key     = (master_seed, stream_id)

Draw ``j`` of trial ``t`` is lane ``j % 4`` of the block ``j // 4`` output.
The block function matches numpy's ``np.random.Philox`` bit for bit (this
is pinned by a test), but is exposed as a numba kernel so that large
vectorized experiments stay cheap.

Exponential variates use the inverse CDF, ``xi = -ln(1 - U)``, with
``U = 1 - (r + 1/2) * 2**-64`` built from the raw 64-bit word ``r``.  The
half-integer offset keeps ``U`` strictly inside (0, 1), so ``xi`` is
strictly positive: a sampled leading coefficient can never vanish.
"""

from __future__ import annotations

import numba
import numpy as np

# Stream ids keep independent random uses of the same master seed apart.
STREAM_COEFFS = 0
STREAM_DISCRETIZE = 1
STREAM_QUANTILE = 2

_M0 = np.uint64(0xD2E7470EE14C6C93)
_M1 = np.uint64(0xCA5A826395121157)
_W0 = np.uint64(0x9E3779B97F4A7C15)
_W1 = np.uint64(0xBB67AE8584CAA73B)

_LN2_64 = 64.0 * 0.6931471805599453094  # 64 ln 2


@numba.njit(cache=True, inline="always")
def _mulhilo(a, b):
    """Full 128-bit product of two uint64 words as (hi, lo)."""
    a_lo = a & np.uint64(0xFFFFFFFF)
    a_hi = a >> np.uint64(32)
    b_lo = b & np.uint64(0xFFFFFFFF)
    b_hi = b >> np.uint64(32)
    t = a_hi * b_lo + ((a_lo * b_lo) >> np.uint64(32))
    t_lo = t & np.uint64(0xFFFFFFFF)
    t_hi = t >> np.uint64(32)
    t_lo += a_lo * b_hi
    hi = a_hi * b_hi + t_hi + (t_lo >> np.uint64(32))
    lo = a * b
    return hi, lo


@numba.njit(cache=True)
def _philox_block(c0, c1, c2, c3, k0, k1):
    """One Philox-4x64-10 block: 10 rounds, returns 4 output words."""
    for _ in range(10):
        hi0, lo0 = _mulhilo(np.uint64(_M0), c0)
        hi1, lo1 = _mulhilo(np.uint64(_M1), c2)
        c0 = hi1 ^ c1 ^ k0
        c1 = lo1
        c2 = hi0 ^ c3 ^ k1
        c3 = lo0
        k0 = k0 + np.uint64(_W0)
        k1 = k1 + np.uint64(_W1)
    return c0, c1, c2, c3


@numba.njit(cache=True)
def raw_words(seed, stream, trial, count):
    """``count`` raw 64-bit words for the given (seed, stream, trial)."""
    out = np.empty(count, dtype=np.uint64)
    nblocks = (count + 3) // 4
    for b in range(nblocks):
        r0, r1, r2, r3 = _philox_block(
            np.uint64(b), np.uint64(trial), np.uint64(0), np.uint64(0),
            np.uint64(seed), np.uint64(stream))
        base = 4 * b
        out[base] = r0
        if base + 1 < count:
            out[base + 1] = r1
        if base + 2 < count:
            out[base + 2] = r2
        if base + 3 < count:
            out[base + 3] = r3
    return out


@numba.njit(cache=True)
def uniform_open(seed, stream, trial, count):
    """Uniforms strictly inside (0, 1): U = (r + 1/2) * 2**-64."""
    raw = raw_words(seed, stream, trial, count)
    out = np.empty(count, dtype=np.float64)
    for i in range(count):
        out[i] = (np.float64(raw[i]) + 0.5) * 2.0**-64
    return out


@numba.njit(cache=True)
def exponential_draws(seed, stream, trial, count):
    """Exponential(1) draws via xi = -ln(1-U) = 64 ln 2 - ln(r + 1/2)."""
    raw = raw_words(seed, stream, trial, count)
    out = np.empty(count, dtype=np.float64)
    for i in range(count):
        out[i] = _LN2_64 - np.log(np.float64(raw[i]) + 0.5)
    return out


@numba.njit(cache=True, parallel=False)
def exponential_matrix(seed, stream, trial_start, trials, count):
    """Exponential(1) draws for a contiguous block of trials, one row each."""
    out = np.empty((trials, count), dtype=np.float64)
    for t in range(trials):
        out[t, :] = exponential_draws(seed, stream, trial_start + t, count)
    return out


def exponential_coefficients(degree: int, seed: int, trial: int = 0) -> np.ndarray:
    """Coefficient vector (xi_0, ..., xi_n) of independent Exponential(1) draws.

    Coefficient j is draw j of the (seed, STREAM_COEFFS, trial) stream, so
    the value of xi_j depends only on (seed, trial, j).
    """
    if degree < 0:
        raise ValueError("degree must be nonnegative")
    return exponential_draws(np.uint64(seed), np.uint64(STREAM_COEFFS),
                             np.uint64(trial), degree + 1)
