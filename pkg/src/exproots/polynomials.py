"""Dense real polynomials: sampling, evaluation, expansion, exact powers.

Two representations live here.  ``Polynomial`` holds float64 coefficients
(ascending powers) and is the workhorse for sampling and root finding.
``ExactPolynomial`` holds arbitrary-precision rationals and exists so that
sign questions about coefficients of high powers are decided exactly,
never through float rounding.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .rng import exponential_coefficients


class SymmetryError(ValueError):
    """Input root multiset is not closed under complex conjugation."""


@dataclass(frozen=True)
class Polynomial:
    """Real polynomial sum_j c_j z^j with c_j = coefficients[j], c_n != 0."""

    coefficients: np.ndarray

    def __post_init__(self):
        coeffs = np.asarray(self.coefficients, dtype=np.float64)
        if coeffs.ndim != 1 or coeffs.size == 0:
            raise ValueError("coefficients must be a nonempty 1-d sequence")
        if coeffs[-1] == 0.0:
            raise ValueError("leading coefficient must be nonzero")
        coeffs = coeffs.copy()
        coeffs.flags.writeable = False
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def degree(self) -> int:
        return self.coefficients.size - 1


@dataclass(frozen=True)
class ExactPolynomial:
    """Polynomial with exact rational coefficients (ascending powers)."""

    coefficients: tuple

    def __post_init__(self):
        coeffs = tuple(Fraction(c) for c in self.coefficients)
        if not coeffs:
            raise ValueError("coefficients must be nonempty")
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @classmethod
    def from_polynomial(cls, p: Polynomial) -> "ExactPolynomial":
        """Exact binary-to-rational lift of float coefficients."""
        return cls(tuple(Fraction(float(c)) for c in p.coefficients))


def sample_exponential_poly(n: int, seed: int, trial: int = 0) -> Polynomial:
    """Random polynomial of degree n with i.i.d. Exponential(1) coefficients.

    Deterministic given (n, seed, trial); see :mod:`exproots.rng` for the
    counter-based derivation that makes trial-level parallelism safe.
    """
    return Polynomial(exponential_coefficients(n, seed, trial))


def evaluate(p: Polynomial, z: complex) -> complex:
    """Horner evaluation of p at a complex point (or array of points)."""
    coeffs = p.coefficients
    acc = np.zeros_like(np.asarray(z, dtype=np.complex128))
    for c in coeffs[::-1]:
        acc = acc * z + c
    if np.ndim(z) == 0:
        return complex(acc)
    return acc


def _pair_up_roots(roots: Sequence[complex], tol_scale: float = 1e-8):
    """Split roots into (upper-half pairs, reals); raise if not symmetric.

    A root with |Im z| <= tol_scale*(1+|z|) counts as real.  Remaining
    roots must match into conjugate pairs within 2*tol of each other.
    """
    pending = []
    reals = []
    for z in map(complex, roots):
        if abs(z.imag) <= tol_scale * (1.0 + abs(z)):
            reals.append(z.real)
        else:
            pending.append(z)
    upper = sorted((z for z in pending if z.imag > 0), key=lambda w: (w.real, w.imag))
    lower = sorted((z for z in pending if z.imag < 0), key=lambda w: (w.real, w.imag))
    if len(upper) != len(lower):
        raise SymmetryError("unequal numbers of upper and lower half-plane roots")
    used = [False] * len(lower)
    pairs = []
    for z in upper:
        best, best_d = -1, np.inf
        for i, w in enumerate(lower):
            if used[i]:
                continue
            d = abs(z - np.conj(w))
            if d < best_d:
                best, best_d = i, d
        if best < 0 or best_d > 2.0 * tol_scale * (1.0 + abs(z)):
            raise SymmetryError(
                f"root {z} has no conjugate partner within tolerance")
        used[best] = True
        pairs.append(z)
    return pairs, reals


def monic_from_roots(roots: Sequence[complex],
                     pairing_tol: float = 1e-8,
                     imag_residue_tol: float = 1e-12) -> Polynomial:
    """Monic real polynomial prod (z - z_j) from a conjugate-closed root set.

    The product is accumulated in complex arithmetic; the imaginary residue
    of every coefficient must stay below ``imag_residue_tol`` times the
    coefficient scale before it is discarded.
    """
    roots = [complex(z) for z in roots]
    _pair_up_roots(roots, pairing_tol)  # raises SymmetryError if asymmetric
    coeffs = np.array([1.0 + 0.0j])
    for z in roots:
        coeffs = np.convolve(coeffs, np.array([-z, 1.0 + 0.0j]))
    scale = np.max(np.abs(coeffs))
    residue = np.max(np.abs(coeffs.imag))
    if residue > imag_residue_tol * scale:
        raise SymmetryError(
            f"imaginary residue {residue:.3e} exceeds {imag_residue_tol:.1e} "
            f"x coefficient scale {scale:.3e}")
    return Polynomial(coeffs.real)


def poly_multiply(p: ExactPolynomial, q: ExactPolynomial) -> ExactPolynomial:
    """Exact convolution product.

    Integer-valued inputs are convolved with plain Python ints, which is
    much faster than Fraction arithmetic on long power chains.
    """
    a, b = p.coefficients, q.coefficients
    if all(c.denominator == 1 for c in a) and all(c.denominator == 1 for c in b):
        ai = [c.numerator for c in a]
        bi = [c.numerator for c in b]
        out = [0] * (len(ai) + len(bi) - 1)
        for i, x in enumerate(ai):
            if x == 0:
                continue
            for j, y in enumerate(bi):
                out[i + j] += x * y
        return ExactPolynomial(tuple(out))
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            out[i + j] += x * y
    return ExactPolynomial(tuple(out))


def poly_power(p: ExactPolynomial, m: int) -> ExactPolynomial:
    """Exact p**m by repeated squaring."""
    if m < 1:
        raise ValueError("exponent must be >= 1")
    result = None
    base = p
    while m:
        if m & 1:
            result = base if result is None else poly_multiply(result, base)
        m >>= 1
        if m:
            base = poly_multiply(base, base)
    return result


def all_coefficients_positive(p: ExactPolynomial) -> bool:
    """True iff every coefficient is strictly positive (exact comparison)."""
    return all(c > 0 for c in p.coefficients)
