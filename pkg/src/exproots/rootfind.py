"""Simultaneous root finding with backward-error certificates.

The solver is an Aberth-Ehrlich iteration with Gauss-Seidel (immediate)
updates in a fixed root order, so a run is deterministic but internally
sequential.  Evaluation is overflow-safe: points outside the unit disc are
evaluated through the reversed polynomial at 1/z, which keeps degree-256
polynomials with wildly scaled coefficients inside float64 range.

Each returned root z carries the certificate

    backward_error(z) = |p(z)| / sum_j |c_j| |z|^j  <= tol,

i.e. z is an exact root of a polynomial whose coefficients differ
relatively from p's by at most tol.  The certificate itself is recomputed
at the final iterates in 80-bit extended precision so its reported value
is trustworthy even when |p(z)| sits near the float64 rounding floor.
"""

from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

from .polynomials import Polynomial


class ConvergenceError(RuntimeError):
    """Aberth sweeps exhausted before all roots were certified."""

    def __init__(self, message, best_roots, backward_errors):
        super().__init__(message)
        self.best_roots = best_roots
        self.backward_errors = backward_errors


@dataclass(frozen=True)
class RootConfiguration:
    """Certified zero set split into k conjugate pairs and n-2k real roots.

    ``pairs`` holds the strictly-upper-half-plane representative of each
    conjugate pair; ``reals`` the real roots.  ``backward_errors`` are per
    returned root, ordered pairs-then-reals.
    """

    pairs: np.ndarray
    reals: np.ndarray
    backward_errors: np.ndarray
    degree: int

    def __post_init__(self):
        pairs = np.asarray(self.pairs, dtype=np.complex128)
        reals = np.asarray(self.reals, dtype=np.float64)
        if 2 * pairs.size + reals.size != self.degree:
            raise ValueError("2*|pairs| + |reals| must equal the degree")
        if pairs.size and not (pairs.imag > 0).all():
            raise ValueError("pair representatives must have Im z > 0")
        for name, arr in (("pairs", pairs), ("reals", reals),
                          ("backward_errors", np.asarray(self.backward_errors))):
            arr = arr.copy()
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @property
    def k(self) -> int:
        return self.pairs.size

    def all_roots(self) -> np.ndarray:
        """Full multiset of n roots: pairs, their conjugates, then reals."""
        return np.concatenate([self.pairs, np.conj(self.pairs),
                               self.reals.astype(np.complex128)])


@numba.njit(cache=True)
def _newton_step_and_residual(c, z):
    """(p/p', |p|/sum|c||z|^j) at one point, overflow-safe, c ascending."""
    n = c.shape[0] - 1
    az = abs(z)
    if az <= 1.0:
        p = 0.0 + 0.0j
        dp = 0.0 + 0.0j
        s = 0.0
        for i in range(n, -1, -1):
            dp = dp * z + p
            p = p * z + c[i]
            s = s * az + abs(c[i])
        be = abs(p) / s if s > 0.0 else 0.0
        if dp == 0:
            return 0.0 + 0.0j, be
        return p / dp, be
    # reversed polynomial q(w) = sum c[n-j] w^j at w = 1/z:
    # p(z) = z^n q(w),  p'(z) = z^(n-1) (n q(w) - w q'(w)),
    # so p/p' = z q / (n q - w q') and the z^n factors cancel in the
    # backward error as well.
    w = 1.0 / z
    aw = abs(w)
    q = 0.0 + 0.0j
    dq = 0.0 + 0.0j
    s = 0.0
    for i in range(n + 1):
        dq = dq * w + q
        q = q * w + c[i]
        s = s * aw + abs(c[i])
    be = abs(q) / s if s > 0.0 else 0.0
    denom = n * q - w * dq
    if denom == 0:
        return 0.0 + 0.0j, be
    return z * q / denom, be


@numba.njit(cache=True)
def _aberth_sweeps(c, z, tol, max_sweeps):
    """Gauss-Seidel Aberth iteration; returns (roots, residuals, sweeps)."""
    n = z.shape[0]
    be = np.ones(n, dtype=np.float64)
    for sweep in range(max_sweeps):
        for i in range(n):
            step, b = _newton_step_and_residual(c, z[i])
            be[i] = b
            if b <= tol:
                continue
            s = 0.0 + 0.0j
            for j in range(n):
                if j != i:
                    d = z[i] - z[j]
                    if d == 0:
                        d = 1e-15 * (1.0 + abs(z[i]))
                    s += 1.0 / d
            denom = 1.0 - step * s
            if abs(denom) < 1e-14:
                # coincident cluster: take a rotated damped Newton step
                z[i] = z[i] - step * (0.5 + 0.5j)
            else:
                z[i] = z[i] - step / denom
        done = True
        for i in range(n):
            if be[i] > tol:
                done = False
                break
        if done:
            return z, be, sweep + 1
    return z, be, max_sweeps


def fujiwara_bound(coefficients: np.ndarray) -> float:
    """Fujiwara upper bound on root moduli: 2 max_k ratio_k^(1/k)."""
    c = np.asarray(coefficients, dtype=np.float64)
    n = c.size - 1
    an = abs(c[-1])
    best = 0.0
    for k in range(1, n + 1):
        r = abs(c[n - k]) / an
        if k == n:
            r = r / 2.0
        v = r ** (1.0 / k)
        if v > best:
            best = v
    return 2.0 * best


def _initial_radii(c: np.ndarray) -> np.ndarray:
    """Per-root starting radii from the upper convex hull of (j, log|c_j|).

    The hull segments estimate how many roots live at each modulus scale
    (the classical Newton-polygon heuristic); a single Fujiwara circle
    stalls at degree >= 64 because far-flung roots collide on their way
    out.  Every radius is still clamped to 0.8 x Fujiwara.
    """
    n = c.size - 1
    with np.errstate(divide="ignore"):
        logs = np.log(np.abs(c))
    hull = [0]
    for j in range(1, n + 1):
        if np.isinf(logs[j]):
            continue
        while len(hull) >= 2:
            j1, j2 = hull[-2], hull[-1]
            if (logs[j] - logs[j1]) * (j2 - j1) >= (logs[j2] - logs[j1]) * (j - j1):
                hull.pop()
            else:
                break
        hull.append(j)
    radii = np.empty(n)
    pos = 0
    for a, b in zip(hull[:-1], hull[1:]):
        radii[pos:pos + (b - a)] = (abs(c[a]) / abs(c[b])) ** (1.0 / (b - a))
        pos += b - a
    return np.minimum(radii, 0.8 * fujiwara_bound(c))


def _raw_roots(coefficients: np.ndarray, tol: float, max_sweeps: int):
    c = np.ascontiguousarray(coefficients, dtype=np.complex128)
    n = c.size - 1
    if n == 1:
        root = np.array([-c[0] / c[1]])
        return root, np.zeros(1), 0
    radii = _initial_radii(coefficients)
    k = np.arange(n)
    # equispaced angles with an irrational offset so no start point sits on
    # an axis of symmetry of the polynomial
    z0 = radii * np.exp(1j * (2.0 * np.pi * k / n + 0.4))
    z, be, sweeps = _aberth_sweeps(c, z0.astype(np.complex128), tol, max_sweeps)
    return z, be, sweeps


def _certified_backward_errors(coefficients: np.ndarray,
                               roots: np.ndarray) -> np.ndarray:
    """Backward errors recomputed in extended precision (np.clongdouble)."""
    c = np.asarray(coefficients, dtype=np.longdouble)
    out = np.empty(roots.size, dtype=np.float64)
    for i, z in enumerate(roots):
        az = abs(z)
        if az <= 1.0:
            zz = np.clongdouble(z)
            p = np.clongdouble(0)
            s = np.longdouble(0)
            for a in c[::-1]:
                p = p * zz + a
                s = s * np.longdouble(az) + abs(a)
        else:
            w = np.clongdouble(1.0) / np.clongdouble(z)
            aw = abs(w)
            p = np.clongdouble(0)
            s = np.longdouble(0)
            for a in c:
                p = p * w + a
                s = s * aw + abs(a)
        out[i] = float(abs(p) / s) if s > 0 else 0.0
    return out


class AsymmetryError(ValueError):
    """Roots cannot be split into conjugate pairs plus reals."""


def classify_conjugates(roots, pairing_tol: float | None = None,
                        backward_errors=None, degree: int | None = None) -> RootConfiguration:
    """Snap a root multiset into conjugate pairs and reals.

    Roots with |Im z| <= pairing_tol are flattened to the real axis;
    the rest are matched to their nearest conjugate.  The default
    tolerance 1e-8 * (1 + |z|) tracks the backward error achievable at
    degree <= 256; an explicit pairing_tol is taken as absolute.
    """
    roots = np.asarray(roots, dtype=np.complex128)
    n = roots.size if degree is None else degree
    if backward_errors is None:
        backward_errors = np.zeros(roots.size)
    backward_errors = np.asarray(backward_errors, dtype=np.float64)

    def tol_at(z):
        if pairing_tol is None:
            return 1e-8 * (1.0 + abs(z))
        return pairing_tol

    real_mask = np.array([abs(z.imag) <= tol_at(z) for z in roots])
    reals = roots[real_mask].real
    reals_be = backward_errors[real_mask]
    remaining = roots[~real_mask]
    remaining_be = backward_errors[~real_mask]

    upper_idx = [i for i, z in enumerate(remaining) if z.imag > 0]
    lower_idx = [i for i, z in enumerate(remaining) if z.imag < 0]
    if len(upper_idx) != len(lower_idx):
        raise AsymmetryError(
            f"{len(upper_idx)} upper-half vs {len(lower_idx)} lower-half "
            "roots cannot be conjugate-paired")
    upper_idx.sort(key=lambda i: (remaining[i].real, remaining[i].imag))
    used = np.zeros(len(remaining), dtype=bool)
    pairs = []
    pairs_be = []
    for i in upper_idx:
        z = remaining[i]
        best, best_d = -1, np.inf
        for j in lower_idx:
            if used[j]:
                continue
            d = abs(z - np.conj(remaining[j]))
            if d < best_d:
                best, best_d = j, d
        if best < 0 or best_d > 2.0 * tol_at(z):
            raise AsymmetryError(
                f"root {z} has no conjugate partner within 2x pairing tolerance "
                f"(nearest at distance {best_d:.3e})")
        used[best] = True
        pairs.append(z)
        pairs_be.append(max(remaining_be[i], remaining_be[best]))

    order = np.argsort(reals)
    return RootConfiguration(
        pairs=np.array(pairs, dtype=np.complex128),
        reals=reals[order],
        backward_errors=np.concatenate([np.array(pairs_be, dtype=np.float64),
                                        reals_be[order]]),
        degree=n)


def find_roots(p: Polynomial, tol: float = 1e-10,
               max_sweeps: int = 200) -> RootConfiguration:
    """All roots of p with certified backward error <= tol.

    Raises ConvergenceError (carrying the best iterate and residuals) if
    the sweep budget is exhausted first.
    """
    if p.degree < 1:
        raise ValueError("degree must be >= 1")
    if tol <= 0:
        raise ValueError("tol must be positive")
    # iterate a decade below the certificate target so snapping and the
    # extended-precision re-evaluation cannot flip a root over the threshold
    z, raw_be, _ = _raw_roots(p.coefficients, 0.1 * tol, max_sweeps)
    if (raw_be > tol).any():
        raise ConvergenceError(
            f"{int((raw_be > tol).sum())} of {p.degree} roots above "
            f"backward-error tolerance {tol:.1e} after {max_sweeps} sweeps",
            best_roots=z, backward_errors=raw_be)
    shape = classify_conjugates(z, degree=p.degree)
    # certify at the reported (snapped) points; a conjugate has the same
    # backward error as its representative, so pairs carry one entry
    reported = np.concatenate([shape.pairs, shape.reals.astype(np.complex128)])
    be = _certified_backward_errors(p.coefficients, reported)
    if (be > tol).any():
        raise ConvergenceError(
            f"{int((be > tol).sum())} of {p.degree} roots above backward-error "
            f"tolerance {tol:.1e} after {max_sweeps} sweeps",
            best_roots=reported, backward_errors=be)
    return RootConfiguration(pairs=shape.pairs, reals=shape.reals,
                             backward_errors=be, degree=p.degree)
