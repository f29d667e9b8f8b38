"""Holomorphic extendibility of boundary data along complex lines.

A continuous g on the circle |lambda - lambda0| = rho extends holomorphically
into the disc iff every Fourier coefficient g_hat(m), m < 0, of
theta -> g(lambda0 + rho e^{i theta}) vanishes.  Residuals are |g_hat(m)|;
the contour factor d lambda = i e^{i theta} d theta is dropped, so the moment
of order m >= 0 corresponds to index -(m + 1).
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .boundary_lab import BoundaryFunction
from .geometry import (
    EPS_GEOM,
    BallMobius,
    ComplexLine,
    GeometryError,
    as_point,
    line_boundary_circle,
    line_through,
    make_line,
    norm_sq,
)
from .spectral import (
    FAIL,
    INCONCLUSIVE,
    PASS,
    check_negative_coefficients,
    periodic_fourier_coeffs,
)

__all__ = [
    "MomentReport", "BundleReport", "periodic_fourier_coeffs", "default_nodes",
    "line_extension_residuals", "automorphism_moment_residuals", "bundle_test",
    "spiral_directions", "is_collinear",
]

DEFAULT_TOL = 1e-8
DEFAULT_M_MAX = 32
DEFAULT_LINES = 200


def default_nodes(f: BoundaryFunction) -> int:
    return 512 if f.smoothness == "analytic" else 2048


@dataclass
class MomentReport:
    line: ComplexLine
    lambda0: complex
    rho: float
    residuals: dict
    max_residual: float
    verdict: str
    N: int
    m_max: int
    pole_budget: int = 0
    aliasing_estimate: float = 0.0
    index_convention: str = "laurent"

    @property
    def passed(self) -> bool:
        return self.verdict == PASS

    def to_dict(self) -> dict:
        return {
            "line": {"base": _cpair(self.line.base), "dir": _cpair(self.line.dir)},
            "lambda0": [self.lambda0.real, self.lambda0.imag],
            "rho": self.rho,
            "index_convention": self.index_convention,
            "residuals": {str(m): r for m, r in self.residuals.items()},
            "max_residual": self.max_residual,
            "aliasing_estimate": self.aliasing_estimate,
            "verdict": self.verdict,
            "N": self.N,
            "m_max": self.m_max,
            "pole_budget": self.pole_budget,
        }


def _cpair(z) -> list:
    return [[complex(c).real, complex(c).imag] for c in z]


def _check_sizes(N: int, m_max: int) -> None:
    if m_max < 1:
        raise ValueError("m_max must be positive")
    if N < 4 * m_max:
        raise ValueError(f"N = {N} is below 4 * m_max = {4 * m_max}")


def line_extension_residuals(f: BoundaryFunction, line: ComplexLine, m_max: int = DEFAULT_M_MAX,
                             N: int | None = None, pole_budget: int = 0,
                             tol: float = DEFAULT_TOL) -> MomentReport:
    """Negative Laurent coefficients of f on the boundary circle of ``line``.

    Residual indices run over -m_max <= m < -pole_budget; with budget 0 the
    verdict is holomorphic extendibility into the disc L intersect B.
    """
    N = N or default_nodes(f)
    _check_sizes(N, m_max)
    circ = line_boundary_circle(line)

    def sample(nodes):
        z = line.point(circ.lambda0 + circ.rho * nodes)
        return f(z[0], z[1])

    idx = range(-pole_budget - 1, -m_max - 1, -1)
    chk = check_negative_coefficients(sample, N, idx, tol)
    return MomentReport(line, circ.lambda0, circ.rho,
                        {m: float(r) for m, r in zip(chk.indices, chk.residuals)},
                        chk.max_residual, chk.verdict, N, m_max, pole_budget,
                        chk.aliasing_estimate)


def automorphism_moment_residuals(f: BoundaryFunction, omega: BallMobius, z, m_max: int = DEFAULT_M_MAX,
                                  N: int | None = None, tol: float = DEFAULT_TOL) -> MomentReport:
    """Moments (f o omega)_m(z), m = 0..m_max, along lambda -> omega(lambda z), |lambda| = 1."""
    z = as_point(z)
    if abs(float(norm_sq(z)) - 1.0) > EPS_GEOM * 10:
        raise GeometryError("z must lie on the unit sphere")
    N = N or default_nodes(f)
    _check_sizes(N, m_max + 1)

    def sample(nodes):
        w = omega(np.stack([nodes * z[0], nodes * z[1]]))
        return f(w[0], w[1])

    chk = check_negative_coefficients(sample, N, range(-1, -m_max - 2, -1), tol)
    line = line_through(omega(np.zeros(2, complex)), omega(z))
    circ = line_boundary_circle(line)
    return MomentReport(line, circ.lambda0, circ.rho,
                        {m: float(r) for m, r in zip(range(m_max + 1), chk.residuals)},
                        chk.max_residual, chk.verdict, N, m_max, 0,
                        chk.aliasing_estimate, "moment")


def spiral_directions(n: int, seed: int = 0) -> np.ndarray:
    """``n`` unit directions in C^2 modulo phase, from a seeded Fibonacci spiral.

    Directions modulo phase form the sphere CP^1; |d1|^2 is uniform on [0, 1]
    under the invariant measure, so the spiral is laid out in that coordinate.
    """
    rng = np.random.default_rng(seed)
    offset = rng.random()
    twist = 2 * np.pi * rng.random()
    k = np.arange(n)
    u = (k + offset) / n  # |d1|^2
    phi = twist + k * np.pi * (3.0 - math.sqrt(5.0))
    return np.stack([np.sqrt(u) + 0j, np.sqrt(1.0 - u) * np.exp(1j * phi)])


def is_collinear(vertices) -> bool:
    """True when all vertices lie on one complex line."""
    v = np.asarray(vertices, dtype=complex)
    if len(v) <= 2:
        return True
    diffs = (v[1:] - v[0]).T
    s = np.linalg.svd(diffs, compute_uv=False)
    return bool(s[1] <= 1e-10 * max(s[0], 1e-300))


@dataclass
class BundleReport:
    vertices: list
    lines_per_vertex: int
    reports: list = field(repr=False)
    verdict: str = PASS
    collinear: bool = False
    seed: int = 0

    @property
    def passed(self) -> bool:
        return self.verdict == PASS

    @property
    def worst(self) -> MomentReport | None:
        if not self.reports:
            return None
        return max(self.reports, key=lambda r: r.max_residual)

    @property
    def max_residual(self) -> float:
        return max((r.max_residual for r in self.reports), default=0.0)

    def to_dict(self) -> dict:
        worst = self.worst
        return {
            "vertices": _cpair_list(self.vertices),
            "lines_per_vertex": self.lines_per_vertex,
            "collinear_vertex_set": self.collinear,
            "seed": self.seed,
            "verdict": self.verdict,
            "max_residual": self.max_residual,
            "worst_offender": worst.to_dict() if worst else None,
            "reports": [r.to_dict() for r in self.reports],
        }


def _cpair_list(vs) -> list:
    return [_cpair(v) for v in vs]


def aggregate(verdicts) -> str:
    verdicts = list(verdicts)
    if FAIL in verdicts:
        return FAIL
    if INCONCLUSIVE in verdicts:
        return INCONCLUSIVE
    return PASS


def _workers(workers: int | None) -> int:
    if workers is not None:
        return max(1, workers)
    return max(1, int(os.environ.get("FORELLI_WORKERS", "1")))


def bundle_test(f: BoundaryFunction, vertices, lines_per_vertex: int = DEFAULT_LINES,
                m_max: int = DEFAULT_M_MAX, N: int | None = None, tol: float = DEFAULT_TOL,
                seed: int = 0, workers: int | None = None) -> BundleReport:
    """Run the line test on ``lines_per_vertex`` lines through every vertex."""
    vertices = [as_point(v) for v in vertices]
    if not vertices:
        raise ValueError("bundle_test needs at least one vertex")
    if lines_per_vertex < 1:
        raise ValueError("lines_per_vertex must be >= 1")
    for i, v in enumerate(vertices):
        if norm_sq(v) >= 1.0 - EPS_GEOM:
            raise GeometryError(f"vertex {i} is not interior")
        for w in vertices[:i]:
            if np.allclose(v, w, rtol=0.0, atol=EPS_GEOM):
                raise GeometryError("vertices must be pairwise distinct")
    dirs = spiral_directions(lines_per_vertex, seed)
    lines = [make_line(v, dirs[:, k]) for v in vertices for k in range(lines_per_vertex)]

    def run(line):
        return line_extension_residuals(f, line, m_max, N, 0, tol)

    nw = _workers(workers)
    if nw > 1:
        with ThreadPoolExecutor(nw) as pool:
            reports = list(pool.map(run, lines))
    else:
        reports = [run(line) for line in lines]
    reports.sort(key=lambda r: r.line.key())
    return BundleReport(vertices, lines_per_vertex, reports,
                        aggregate(r.verdict for r in reports),
                        is_collinear(vertices), seed)
