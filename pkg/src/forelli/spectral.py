"""Trapezoidal Fourier coefficients of periodic samples and the shared
pass / fail / inconclusive protocol for vanishing negative coefficients."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"


def _check_power_of_two(N: int) -> None:
    if N < 1 or N & (N - 1):
        raise ValueError(f"sample count must be a power of two, got {N}")


def spectrum(samples) -> np.ndarray:
    """All N coefficients g_hat(m) = (1/N) sum_j g_j e^{-i m theta_j}, FFT order."""
    samples = np.asarray(samples, dtype=complex)
    return np.fft.fft(samples, axis=-1) / samples.shape[-1]


def periodic_fourier_coeffs(samples, indices: Iterable[int]) -> dict[int, complex]:
    """Coefficients at the requested indices, restricted to |m| < N/2."""
    samples = np.asarray(samples, dtype=complex)
    N = samples.shape[-1]
    _check_power_of_two(N)
    indices = list(indices)
    for m in indices:
        if abs(m) >= N // 2:
            raise ValueError(f"index {m} outside the alias-safe band |m| < {N // 2}")
    spec = spectrum(samples)
    return {m: complex(spec[m % N]) for m in indices}


def circle_nodes(N: int) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(N) / N)


@dataclass(frozen=True)
class NegativeCoefficientCheck:
    """Coefficients at indices ``-lo..-hi`` from N and 2N samples."""

    N: int
    indices: tuple[int, ...]
    coeffs: np.ndarray
    errors: np.ndarray
    verdict: str

    @property
    def residuals(self) -> np.ndarray:
        return np.abs(self.coeffs)

    @property
    def max_residual(self) -> float:
        return float(self.residuals.max()) if len(self.indices) else 0.0

    @property
    def aliasing_estimate(self) -> float:
        return float(self.errors.max()) if len(self.indices) else 0.0


def classify(coeffs: np.ndarray, errors: np.ndarray, tol: float) -> str:
    res = np.abs(coeffs)
    if res.size == 0 or (res.max() < tol and errors.max() < tol):
        return PASS
    if np.any((res >= tol) & (res > 2.0 * errors)):
        return FAIL
    return INCONCLUSIVE


def check_negative_coefficients(sample: Callable[[np.ndarray], np.ndarray], N: int,
                                indices: Iterable[int], tol: float) -> NegativeCoefficientCheck:
    """Sample at N and 2N nodes e^{i theta_j}; compare coefficients at ``indices``.

    ``sample`` maps the unit-circle nodes to function values.  The difference
    between the two resolutions estimates the aliasing error of the N-point
    coefficients.
    """
    _check_power_of_two(N)
    indices = tuple(int(m) for m in indices)
    for m in indices:
        if abs(m) >= N // 2:
            raise ValueError(f"index {m} outside the alias-safe band for N = {N}")
    s1 = spectrum(sample(circle_nodes(N)))
    s2 = spectrum(sample(circle_nodes(2 * N)))
    idx = np.array(indices, dtype=int)
    c1 = s1[idx % N] if idx.size else np.zeros(0, complex)
    c2 = s2[idx % (2 * N)] if idx.size else np.zeros(0, complex)
    err = np.abs(c1 - c2)
    return NegativeCoefficientCheck(N, indices, c1, err, classify(c1, err, tol))
