"""Angular slices F^nu, radial coefficients A_l / B_l, reconstruction, and
recovery of the coefficient polynomials of a characterized function.

Slices use the phase convention z2 = r > 0:
F^nu(z1, r) = (1 / 2 pi) int F(z1, r e^{i phi}) e^{-i nu phi} d phi / r^nu.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from math import comb
from typing import Callable

import numpy as np

from .boundary_lab import BoundaryFunction, CharacterizedSpec, horner
from .disc_analysis import polyanalytic_fit
from .geometry import GeometryError
from .spectral import circle_nodes, spectrum

DEFAULT_NU_MAX = 16
DEFAULT_L_MAX = 16


def _slice_nodes(nu_max: int) -> int:
    N = 64
    while N < 4 * nu_max + 16:
        N *= 2
    return N


def angular_spectrum(F: Callable, z1, r, N: int) -> np.ndarray:
    """Fourier coefficients in phi of F(z1, r e^{i phi}); last axis in FFT order."""
    z1 = np.asarray(z1, dtype=complex)[..., None]
    r = np.asarray(r, dtype=float)[..., None]
    vals = F(np.broadcast_to(z1, np.broadcast_shapes(z1.shape, r.shape[:-1] + (N,))),
             r * circle_nodes(N))
    return spectrum(vals)


def angular_slice(F: Callable, z1, r, nu: int, N: int | None = None):
    """F^nu(z1, r); at r = 0 the continuous limit (0 unless nu = 0)."""
    N = N or _slice_nodes(abs(nu))
    if N < 4 * abs(nu) + 16:
        raise ValueError(f"N = {N} too small for nu = {nu}")
    z1 = np.asarray(z1, dtype=complex)
    r = np.asarray(r, dtype=float)
    spec = angular_spectrum(F, z1, r, N)[..., nu % N]
    with np.errstate(divide="ignore", invalid="ignore"):
        out = spec / r ** nu
    if nu == 0:
        out = np.where(r == 0, np.asarray(F(z1, np.zeros_like(z1))), out)
    else:
        out = np.where(r == 0, 0.0, out)
    return out[()] if np.ndim(out) == 0 else out


@dataclass
class SliceGrid:
    """F^nu at node pairs (z1[i], r[i]); ``values[a, i]`` belongs to nus[a]."""

    nus: np.ndarray
    z1: np.ndarray
    r: np.ndarray
    values: np.ndarray
    N: int

    def slice(self, nu: int) -> np.ndarray:
        hit = np.nonzero(self.nus == nu)[0]
        if not hit.size:
            raise KeyError(f"slice nu={nu} not in grid")
        return self.values[hit[0]]

    def active(self, tol: float = 1e-12) -> list[int]:
        return [int(nu) for nu, v in zip(self.nus, self.values) if np.max(np.abs(v)) > tol]

    def to_dict(self) -> dict:
        return {
            "kind": "slice_grid",
            "phase_convention": "z2 real positive",
            "N": self.N,
            "nu": [int(n) for n in self.nus],
            "z1": [[c.real, c.imag] for c in self.z1],
            "r": [float(x) for x in self.r],
            "values": [[[c.real, c.imag] for c in row] for row in self.values],
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["nu", "z1_re", "z1_im", "r", "re", "im"])
        for nu, row in zip(self.nus, self.values):
            for a, rr, v in zip(self.z1, self.r, row):
                w.writerow([int(nu), repr(a.real), repr(a.imag), repr(float(rr)), repr(v.real), repr(v.imag)])
        return buf.getvalue()


def slice_grid(F: Callable, z1, r=None, nu_max: int = DEFAULT_NU_MAX, N: int | None = None) -> SliceGrid:
    """Slices -nu_max..nu_max at node pairs; ``r=None`` puts nodes on the sphere."""
    z1 = np.atleast_1d(np.asarray(z1, dtype=complex))
    if r is None:
        r = np.sqrt(np.clip(1.0 - np.abs(z1) ** 2, 0.0, None))
    r = np.broadcast_to(np.asarray(r, dtype=float), z1.shape).copy()
    if np.any(np.abs(z1) ** 2 + r ** 2 > 1.0 + 1e-12):
        raise GeometryError("slice nodes must lie in the closed ball")
    N = N or _slice_nodes(nu_max)
    spec = angular_spectrum(F, z1, r, N)
    nus = np.arange(-nu_max, nu_max + 1)
    vals = np.empty((len(nus), len(z1)), dtype=complex)
    f0 = None
    for a, nu in enumerate(nus):
        with np.errstate(divide="ignore", invalid="ignore"):
            row = spec[:, nu % N] / r ** nu
        if nu == 0:
            if f0 is None:
                f0 = np.asarray(F(z1, np.zeros_like(z1)), dtype=complex)
            row = np.where(r == 0, f0, row)
        else:
            row = np.where(r == 0, 0.0, row)
        vals[a] = row
    return SliceGrid(nus, z1, r, vals, N)


def reconstruct(grid: SliceGrid, z, nu_max: int | None = None) -> complex:
    """Partial sum over |nu| <= nu_max of F^nu(z1, |z2|) z2^nu at a grid node."""
    z1, z2 = complex(z[0]), complex(z[1])
    nu_max = int(np.max(np.abs(grid.nus))) if nu_max is None else nu_max
    for nu in range(-nu_max, nu_max + 1):
        if nu not in grid.nus:
            raise KeyError(f"slice nu={nu} missing from grid")
    hit = np.nonzero((np.abs(grid.z1 - z1) <= 1e-14) & (np.abs(grid.r - abs(z2)) <= 1e-14))[0]
    if not hit.size:
        raise ValueError("point is not a grid node; interpolation is not supported")
    i = hit[0]
    total = 0j
    for nu in range(-nu_max, nu_max + 1):
        v = grid.slice(nu)[i]
        if z2 == 0:
            if nu == 0:
                total += v
            continue
        total += v * z2 ** nu
    return total


# -- radial coefficients ------------------------------------------------------

def catalog_slice(f: BoundaryFunction, nu: int) -> Callable:
    """F^nu(z1, w) as an explicit function of z1 and w = |z2|^2.

    Available for the catalog families whose slices have a closed form on
    the sphere; powers of w may be negative (the characterized class).
    """
    fam = f.family
    if fam == "holomorphic_poly":
        poly = f.params["coeffs"]
        coeffs = {p: c for (p, q), c in poly.items() if q == nu}

        def s(z1, w):
            return sum((c * np.asarray(z1) ** p for p, c in coeffs.items()), 0j) + 0 * np.asarray(w)
        return s
    if fam == "globevnik":
        k = f.params["k"]
        if nu == k + 1:
            return lambda z1, w: 1.0 / np.asarray(w) + 0 * np.asarray(z1)
        return lambda z1, w: 0 * np.asarray(z1) * np.asarray(w)
    if fam == "characterized":
        terms = {j: h for (n, j), h in f.params["spec"].terms.items() if n == nu}

        def s(z1, w):
            w = np.asarray(w, dtype=complex)
            return sum((horner(h, z1) * w ** (-j) for j, h in terms.items()), 0 * w)
        return s
    if fam == "modulus_sq":
        if nu == 0:
            return lambda z1, w: np.abs(z1) ** 2 + 0 * np.asarray(w)
        return lambda z1, w: 0 * np.asarray(z1) * np.asarray(w)
    raise ValueError(f"no closed-form slice for family {fam!r}")


def radial_taylor(slice_fn: Callable, z1, l: int, nu: int, N_w: int = 64) -> tuple[complex, complex]:
    """(A_l, B_l) at z1 from the contour |w| = 1 - |z1|^2.

    A_l is the coefficient of w^l, extracted by the trapezoid rule on
    w = (1 - |z1|^2) zeta, |zeta| = 1, and divided by (1 - |z1|^2)^l;
    B_l = A_l (1 - |z1|^2)^(l + nu).  Negative l is allowed.
    """
    z1 = complex(z1)
    R = 1.0 - abs(z1) ** 2
    if R <= 0.0:
        raise GeometryError("radial contour collapses for |z1| >= 1")
    zeta = circle_nodes(N_w)
    vals = np.asarray(slice_fn(np.full(N_w, z1), R * zeta), dtype=complex)
    A = complex(np.mean(vals * zeta ** (-l))) / R ** l
    return A, A * R ** (l + nu)


@dataclass
class RadialCoeffs:
    nu: int
    ls: np.ndarray
    z1: np.ndarray
    A: np.ndarray
    B: np.ndarray

    def to_dict(self) -> dict:
        return {
            "kind": "radial_coeffs", "nu": self.nu,
            "l": [int(x) for x in self.ls],
            "z1": [[c.real, c.imag] for c in self.z1],
            "A": [[[c.real, c.imag] for c in row] for row in self.A],
            "B": [[[c.real, c.imag] for c in row] for row in self.B],
        }


def radial_coeffs(slice_fn: Callable, z1, nu: int, ls=None, N_w: int = 64) -> RadialCoeffs:
    z1 = np.atleast_1d(np.asarray(z1, dtype=complex))
    ls = np.arange(-DEFAULT_L_MAX, DEFAULT_L_MAX + 1) if ls is None else np.asarray(ls, dtype=int)
    A = np.empty((len(ls), len(z1)), dtype=complex)
    B = np.empty_like(A)
    for i, l in enumerate(ls):
        for j, a in enumerate(z1):
            A[i, j], B[i, j] = radial_taylor(slice_fn, a, int(l), nu, N_w)
    return RadialCoeffs(nu, ls, z1, A, B)


# -- sphere-restricted reduction to the disc -------------------------------------

def reduced_disc_function(f: Callable, nu: int, N: int | None = None) -> Callable:
    """z -> (1 - |z|^2)^nu F^nu(z, sqrt(1 - |z|^2)) from boundary data f."""
    N = N or _slice_nodes(abs(nu))

    def B(z):
        z = np.asarray(z, dtype=complex)
        r2 = np.clip(1.0 - np.abs(z) ** 2, 0.0, None)
        return angular_slice(f, z, np.sqrt(r2), nu, N) * r2 ** nu
    return B


def smooth_weight_profile(f: Callable, nu: int, moduli, n_angles: int = 32, N: int | None = None) -> np.ndarray:
    """max over |z1| = s of |F^nu(z1, |z2|) (1 - |z1|^2)^nu| on the sphere, per s."""
    B = reduced_disc_function(f, nu, N)
    theta = circle_nodes(n_angles)
    return np.array([np.max(np.abs(B(s * theta))) for s in moduli])


@dataclass
class CharspecRecovery:
    spec: CharacterizedSpec
    fit_residuals: dict
    forbidden_residual: float
    negative_slice_max: float


def recover_charspec(f: Callable, nu_max: int = 6, degree: int = 4, radii=None,
                     N: int | None = None, tol: float = 1e-10) -> CharspecRecovery:
    """Recover h_{nu,j} from boundary data of a characterized function.

    On the sphere, (1 - |z1|^2)^nu F^nu = sum_j h_j(z1) (1 - z1 conj(z1))^(nu - j)
    is polyanalytic of order nu; expanding the binomial, the coefficient of
    conj(z1)^k is (-1)^k z1^k sum_j C(nu - j, k) h_j(z1).  The polyanalytic fit
    gives the left side and the anti-triangular binomial system gives h_j.
    """
    N = N or _slice_nodes(nu_max)
    terms, fit_res = {}, {}
    forbidden = 0.0
    for nu in range(nu_max + 1):
        B = reduced_disc_function(f, nu, N)
        fit = polyanalytic_fit(B, nu, radii=radii, poly_degree=degree + nu)
        fit_res[nu] = fit.residual
        table = fit.E.padded(nu, degree + nu)
        q = np.zeros((nu + 1, degree + 1), dtype=complex)
        for k in range(nu + 1):
            q[k] = (-1) ** k * table[k, k:k + degree + 1]
        M = np.array([[comb(nu - j, k) for j in range(nu + 1)] for k in range(nu + 1)], dtype=float)
        h = np.linalg.solve(M, q)
        for j in range(nu + 1):
            allowed = 2 * j < nu or nu == j == 0
            if allowed:
                if np.max(np.abs(h[j])) > tol:
                    terms[(nu, j)] = h[j]
            else:
                forbidden = max(forbidden, float(np.max(np.abs(h[j]))))
    neg = 0.0
    z1 = 0.6 * circle_nodes(16)
    grid = slice_grid(f, z1, nu_max=nu_max, N=N)
    for nu in range(-nu_max, 0):
        neg = max(neg, float(np.max(np.abs(grid.slice(nu)))))
    return CharspecRecovery(CharacterizedSpec(terms), fit_res, forbidden, neg)


def charspec_error(true: CharacterizedSpec, fitted: CharacterizedSpec) -> float:
    """max coefficient deviation over all (nu, j), relative to the largest true coefficient."""
    keys = set(true.terms) | set(fitted.terms)
    scale = max(float(np.max(np.abs(h))) for h in true.terms.values()) if true.terms else 1.0
    worst = 0.0
    for key in keys:
        a = true.terms.get(key, np.zeros(1, complex))
        b = fitted.terms.get(key, np.zeros(1, complex))
        n = max(len(a), len(b))
        a = np.pad(a, (0, n - len(a)))
        b = np.pad(b, (0, n - len(b)))
        worst = max(worst, float(np.max(np.abs(a - b))))
    return worst / scale
