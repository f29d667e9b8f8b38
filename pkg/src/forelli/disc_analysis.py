"""Polyanalytic functions in the unit disc and meromorphic extension from circles.

On a circle |z - e| = t one has conj(z) = conj(e) + t^2 / (z - e), so a
polyanalytic function sum_k h_k(z) conj(z)^k of order nu continues inside
the circle with a single pole of order <= nu at the Euclidean center e.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Callable, Sequence

import numpy as np

from .boundary_lab import horner
from .geometry import hyperbolic_to_euclidean
from .spectral import FAIL, INCONCLUSIVE, PASS, circle_nodes, classify, spectrum

DEFAULT_TOL = 1e-9


class IllConditioned(ValueError):
    pass


@dataclass(frozen=True)
class PolyanalyticFunction:
    """E(z) = sum_k h_k(z) conj(z)^k, each h_k an ascending coefficient array."""

    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(np.atleast_1d(np.asarray(h, dtype=complex))
                                                 for h in self.coeffs))

    @property
    def order(self) -> int:
        nz = [k for k, h in enumerate(self.coeffs) if np.any(h != 0)]
        return max(nz) if nz else 0

    @property
    def degree(self) -> int:
        return max((len(h) - 1 for h in self.coeffs), default=0)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        zb = np.conj(z)
        acc = np.zeros_like(z)
        for h in reversed(self.coeffs):
            acc = acc * zb + horner(h, z)
        return acc

    def padded(self, order: int, degree: int) -> np.ndarray:
        """Coefficient table c[k, p] of z^p conj(z)^k."""
        out = np.zeros((order + 1, degree + 1), dtype=complex)
        for k, h in enumerate(self.coeffs[:order + 1]):
            out[k, :min(len(h), degree + 1)] = h[:degree + 1]
        return out


def polyanalytic_eval(E: PolyanalyticFunction, z):
    return E(z)


def random_polyanalytic(rng: np.random.Generator, order: int, degree: int) -> PolyanalyticFunction:
    return PolyanalyticFunction(tuple(rng.standard_normal(degree + 1) + 1j * rng.standard_normal(degree + 1)
                                      for _ in range(order + 1)))


def taylor_shift(coeffs, e) -> np.ndarray:
    """Coefficients of h(z) in powers of (z - e)."""
    a = np.asarray(coeffs, dtype=complex)
    n = len(a)
    b = np.zeros(n, dtype=complex)
    for p in range(n):
        for s in range(p + 1):
            b[s] += a[p] * comb(p, s) * e ** (p - s)
    return b


@dataclass(frozen=True)
class CircleExtension:
    """Meromorphic continuation of E from the circle |z - e| = t.

    ``laurent`` maps n to the coefficient of (z - e)^n.
    """

    E: PolyanalyticFunction
    e: complex
    t: float
    laurent: dict = field(repr=False)

    @property
    def pole_order(self) -> int:
        scale = max((abs(c) for c in self.laurent.values()), default=0.0)
        neg = [-n for n, c in self.laurent.items() if n < 0 and abs(c) > 1e-12 * max(scale, 1.0)]
        return max(neg, default=0)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        at_pole = z == self.e
        zz = np.where(at_pole, self.e + 1.0, z)
        w = np.conj(self.e) + self.t ** 2 / (zz - self.e)
        acc = np.zeros_like(zz)
        for h in reversed(self.E.coeffs):
            acc = acc * w + horner(h, zz)
        if np.any(at_pole):
            fill = complex(np.inf, 0) if self.pole_order > 0 else self.laurent.get(0, 0j)
            acc = np.where(at_pole, fill, acc)
        return acc[()] if acc.ndim == 0 else acc


def closed_form_circle_extension(E: PolyanalyticFunction, e, t) -> CircleExtension:
    e, t = complex(e), float(t)
    if abs(e) + t > 1.0 + 1e-12:
        raise ValueError("circle must lie in the closed unit disc")
    laurent: dict[int, complex] = {}
    eb = e.conjugate()
    for k, h in enumerate(E.coeffs):
        b = taylor_shift(h, e)
        for i in range(k + 1):
            w = comb(k, i) * eb ** (k - i) * t ** (2 * i)
            for s, bs in enumerate(b):
                laurent[s - i] = laurent.get(s - i, 0j) + w * bs
    return CircleExtension(E, e, t, dict(sorted(laurent.items())))


@dataclass
class CircleExtensionReport:
    e: complex
    t: float
    coeffs: dict
    errors: dict
    pole_order: int
    order_stable: bool
    tol: float
    N: int
    m_max: int

    def verdict(self, budget: int) -> str:
        budget = max(int(budget), 0)
        idx = [m for m in self.coeffs if m < -budget]
        c = np.array([self.coeffs[m] for m in idx], dtype=complex)
        err = np.array([self.errors[m] for m in idx])
        return classify(c, err, self.tol)

    def passes(self, budget: int) -> bool:
        return self.verdict(budget) == PASS

    def to_dict(self) -> dict:
        return {
            "e": [self.e.real, self.e.imag], "t": self.t,
            "pole_order": self.pole_order, "order_stable": self.order_stable,
            "coeffs": {str(m): [c.real, c.imag] for m, c in self.coeffs.items()},
            "N": self.N, "m_max": self.m_max, "tol": self.tol,
        }


def _detect_order(coeffs: dict, tol: float) -> int:
    big = [-m for m, c in coeffs.items() if m < 0 and abs(c) >= tol]
    return max(big, default=0)


def circle_mero_coeffs(g: Callable, e, t, m_max: int = 32, N: int = 256,
                       tol: float = DEFAULT_TOL) -> CircleExtensionReport:
    """Laurent data of theta -> g(e + t e^{i theta}) from N and 2N samples."""
    if N < 4 * m_max:
        raise ValueError(f"N = {N} is below 4 * m_max")
    e, t = complex(e), float(t)
    s1 = spectrum(g(e + t * circle_nodes(N)))
    s2 = spectrum(g(e + t * circle_nodes(2 * N)))
    idx = np.arange(-m_max, m_max + 1)
    c1, c2 = s1[idx % N], s2[idx % (2 * N)]
    coeffs = {int(m): complex(c) for m, c in zip(idx, c1)}
    errors = {int(m): float(d) for m, d in zip(idx, np.abs(c1 - c2))}
    k1 = _detect_order(coeffs, tol)
    k2 = _detect_order(coeffs, 100 * tol)
    return CircleExtensionReport(e, t, coeffs, errors, k1, k1 == k2, tol, N, m_max)


@dataclass
class FamilyReport:
    center: complex
    nu: int
    reports: list
    verdict: str

    @property
    def budget(self) -> int:
        return max(self.nu, 0)

    @property
    def passed(self) -> bool:
        return self.verdict == PASS

    def to_dict(self) -> dict:
        return {"center": [self.center.real, self.center.imag], "nu": self.nu,
                "budget": self.budget, "verdict": self.verdict,
                "circles": [r.to_dict() for r in self.reports]}


def hyperbolic_family_test(B: Callable, c, nu: int, r_grid: Sequence[float], tol: float = DEFAULT_TOL,
                           m_max: int = 32, N: int = 256) -> FamilyReport:
    """Condition (H, c, nu) on the circles H(c, r), r in ``r_grid``."""
    c = complex(c)
    reports, verdicts = [], []
    budget = max(int(nu), 0)
    for r in r_grid:
        e, t = hyperbolic_to_euclidean(c, r)
        rep = circle_mero_coeffs(B, e, t, m_max, N, tol)
        reports.append(rep)
        verdicts.append(rep.verdict(budget))
    if FAIL in verdicts:
        verdict = FAIL
    elif INCONCLUSIVE in verdicts:
        verdict = INCONCLUSIVE
    else:
        verdict = PASS
    return FamilyReport(c, int(nu), reports, verdict)


def chebyshev_radii(n: int, lo: float = 0.35, hi: float = 0.85) -> np.ndarray:
    k = np.arange(n)
    x = np.cos((2 * k + 1) * np.pi / (2 * n))
    return np.sort(0.5 * (lo + hi) + 0.5 * (hi - lo) * x)


@dataclass
class FitResult:
    E: PolyanalyticFunction
    residual: float
    condition: float
    radii: np.ndarray


def polyanalytic_fit(B: Callable, nu: int, radii=None, N: int | None = None,
                     poly_degree: int = 8, verify_radii=None) -> FitResult:
    """Fit B by sum_{k <= nu} h_k(z) conj(z)^k with deg h_k <= poly_degree.

    On |z| = s the frequency-n Fourier coefficient of B is
    sum_k c[k, n + k] s^(n + 2k), a polynomial in s^2 after dividing by s^n;
    one small least-squares problem is solved per frequency.
    """
    nu = max(int(nu), 0)
    if radii is None:
        radii = chebyshev_radii(2 * nu + 4)
    radii = np.unique(np.asarray(radii, dtype=float))
    if len(radii) < nu + 1:
        raise ValueError(f"need at least {nu + 1} distinct radii, got {len(radii)}")
    if np.any((radii <= 0) | (radii >= 1)):
        raise ValueError("radii must lie in (0, 1)")
    band = poly_degree + nu
    if N is None:
        N = 64
        while N < 4 * (band + 1):
            N *= 2
    if N <= 2 * band:
        raise ValueError("N too small for the requested degree and order")
    nodes = circle_nodes(N)
    spec = np.array([spectrum(B(s * nodes)) for s in radii])  # (n_radii, N)
    x = radii ** 2
    c = np.zeros((nu + 1, poly_degree + 1), dtype=complex)
    worst_cond = 1.0
    for n in range(-nu, poly_degree + 1):
        ks = [k for k in range(nu + 1) if 0 <= n + k <= poly_degree]
        A = np.array([[xi ** k for k in ks] for xi in x])
        rhs = spec[:, n % N] / radii ** n
        cond = np.linalg.cond(A)
        worst_cond = max(worst_cond, cond)
        if cond > 1e10:
            raise IllConditioned(
                f"radii system has condition number {cond:.2e} at frequency {n}; "
                f"spread the radii, e.g. chebyshev_radii({len(ks) + 2}, 0.2, 0.9)")
        sol = np.linalg.lstsq(A, rhs, rcond=None)[0]
        for k, v in zip(ks, sol):
            c[k, n + k] = v
    E = PolyanalyticFunction(tuple(c))
    if verify_radii is None:
        verify_radii = np.linspace(0.05, 0.95, 10)
    vz = np.concatenate([s * circle_nodes(64) for s in verify_radii])
    residual = float(np.max(np.abs(B(vz) - E(vz))))
    return FitResult(E, residual, float(worst_cond), radii)


def leading_laurent_coefficient(E: PolyanalyticFunction, e, t) -> complex:
    ext = closed_form_circle_extension(E, e, t)
    k = ext.pole_order
    return ext.laurent.get(-k, 0j)
