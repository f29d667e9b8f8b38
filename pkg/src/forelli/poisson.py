"""Invariant Poisson kernel and integral on the ball of C^2.

The sphere measure is normalised to total mass 1, so P[1] = 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .geometry import BallMobius, GeometryError, as_point, ball_automorphism, norm_sq


@dataclass(frozen=True)
class SphereQuadrature:
    """Product rule on the 3-sphere.

    A sphere point is (sqrt(u) e^{i t1}, sqrt(1-u) e^{i t2}); in (u, t1, t2)
    the normalised measure is du dt1 dt2 / (4 pi^2).  Trapezoid in both
    angles, Gauss-Legendre in u.  The rule integrates z1^p zb1^q z2^r zb2^s
    exactly when |p-q| < n1, |r-s| < n2 and p + r < 2 n_r for balanced
    monomials (p = q, r = s).
    """

    xi1: np.ndarray
    xi2: np.ndarray
    weights: np.ndarray
    n1: int
    n2: int
    n_r: int

    def integrate(self, values) -> complex:
        return complex(np.dot(self.weights, values))

    def __len__(self) -> int:
        return self.weights.size


def sphere_quadrature(n1: int = 64, n2: int = 64, n_r: int = 32) -> SphereQuadrature:
    x, w = np.polynomial.legendre.leggauss(n_r)
    u = 0.5 * (x + 1.0)
    wu = 0.5 * w
    t1 = 2 * np.pi * np.arange(n1) / n1
    t2 = 2 * np.pi * np.arange(n2) / n2
    U, T1, T2 = np.meshgrid(u, t1, t2, indexing="ij")
    W = np.broadcast_to(wu[:, None, None], U.shape) / (n1 * n2)
    xi1 = (np.sqrt(U) * np.exp(1j * T1)).ravel()
    xi2 = (np.sqrt(1.0 - U) * np.exp(1j * T2)).ravel()
    return SphereQuadrature(xi1, xi2, np.ascontiguousarray(W).ravel(), n1, n2, n_r)


_DEFAULT_QUAD: SphereQuadrature | None = None


def default_quadrature() -> SphereQuadrature:
    global _DEFAULT_QUAD
    if _DEFAULT_QUAD is None:
        _DEFAULT_QUAD = sphere_quadrature()
    return _DEFAULT_QUAD


def kernel(z, xi) -> np.ndarray:
    """(1 - |z|^2)^2 / |1 - <z, xi>|^4 for interior z."""
    z = as_point(z)
    r2 = float(norm_sq(z))
    if r2 >= 1.0:
        raise GeometryError("Poisson kernel needs an interior point")
    xi = np.asarray(xi, dtype=complex)
    ip = z[0] * np.conj(xi[0]) + z[1] * np.conj(xi[1])
    return (1.0 - r2) ** 2 / np.abs(1.0 - ip) ** 4


def sphere_jacobian(omega: BallMobius, xi) -> np.ndarray:
    """Jacobian of omega on the sphere w.r.t. the normalised measure.

    d sigma(omega xi) = P(omega^{-1}(0), xi) d sigma(xi).
    """
    return kernel(omega.inverse()(np.zeros(2, complex)), xi)


def kernel_invariance_defect(omega: BallMobius, z, xi) -> np.ndarray:
    """Relative defect of P(omega z, omega xi) d sigma(omega xi) = P(z, xi) d sigma(xi).

    The kernel itself is invariant only under unitaries; for a general
    automorphism it is the kernel measure that is preserved.
    """
    xi = np.asarray(xi, dtype=complex)
    p = kernel(z, xi)
    q = kernel(omega(as_point(z)), omega(xi)) * sphere_jacobian(omega, xi)
    return np.abs(q - p) / p


@dataclass(frozen=True)
class PoissonValue:
    value: complex
    error_estimate: float
    inconclusive: bool


def integral(f: Callable, z, quad: SphereQuadrature | None = None, method: str = "kernel",
             err_tol: float = 1e-8) -> PoissonValue:
    """P[f](z).

    ``method="kernel"`` integrates P(z, .) f against the sphere rule; the
    error estimate is the normalisation defect |Q[P(z, .)] - 1| times max|f|.
    ``method="pullback"`` uses P[f](a) = mean of f o phi_a over the sphere
    with phi_a(0) = a, which needs no kernel at all; its estimate comes from
    comparing against a rule with half the angular resolution.
    """
    quad = quad or default_quadrature()
    z = as_point(z)
    if norm_sq(z) >= 1.0:
        raise GeometryError("Poisson integral evaluated at a non-interior point")
    if method == "kernel":
        P = kernel(z, (quad.xi1, quad.xi2))
        fv = f(quad.xi1, quad.xi2)
        val = quad.integrate(P * fv)
        err = abs(quad.integrate(P) - 1.0) * float(np.max(np.abs(fv)))
    elif method == "pullback":
        phi = ball_automorphism(z)
        w = phi(np.stack([quad.xi1, quad.xi2]))
        val = quad.integrate(f(w[0], w[1]))
        coarse = sphere_quadrature(max(quad.n1 // 2, 2), max(quad.n2 // 2, 2), quad.n_r)
        wc = phi(np.stack([coarse.xi1, coarse.xi2]))
        err = abs(coarse.integrate(f(wc[0], wc[1])) - val)
    else:
        raise ValueError(f"unknown method {method!r}")
    return PoissonValue(val, err, err > err_tol)


def extension(f: Callable, quad: SphereQuadrature | None = None, method: str = "kernel") -> Callable:
    """The interior function z -> P[f](z) (values only)."""
    quad = quad or default_quadrature()
    return lambda z: integral(f, z, quad, method).value


def invariant_laplacian_fd(F: Callable, z, h: float = 1e-3) -> complex:
    """Central-difference estimate of the invariant Laplacian of F at z.

    ``F`` takes a point of C^2 (length-2 complex array).  The real Hessian in
    (x1, y1, x2, y2) is assembled into the Wirtinger derivatives
    d^2 F / dz_i dzbar_k.
    """
    if h < 1e-6:
        raise ValueError("step below 1e-6 loses everything to cancellation")
    z = as_point(z)
    if np.sqrt(norm_sq(z)) > 1.0 - 2.0 * h:
        raise GeometryError("point too close to the sphere for this step")
    x0 = np.array([z[0].real, z[0].imag, z[1].real, z[1].imag])

    def Fx(x):
        return complex(F(np.array([x[0] + 1j * x[1], x[2] + 1j * x[3]])))

    f0 = Fx(x0)
    E = np.eye(4) * h
    H = np.zeros((4, 4), dtype=complex)
    for a in range(4):
        H[a, a] = (Fx(x0 + E[a]) - 2 * f0 + Fx(x0 - E[a])) / h ** 2
        for b in range(a):
            H[a, b] = H[b, a] = (Fx(x0 + E[a] + E[b]) - Fx(x0 + E[a] - E[b])
                                 - Fx(x0 - E[a] + E[b]) + Fx(x0 - E[a] - E[b])) / (4 * h ** 2)
    D = np.zeros((2, 2), dtype=complex)
    for i in range(2):
        for k in range(2):
            xi, yi, xk, yk = 2 * i, 2 * i + 1, 2 * k, 2 * k + 1
            D[i, k] = 0.25 * (H[xi, xk] + H[yi, yk] + 1j * (H[xi, yk] - H[yi, xk]))
    r2 = float(norm_sq(z))
    M = np.eye(2) - np.outer(z, np.conj(z))
    return complex(4.0 * (1.0 - r2) * np.sum(M * D))
