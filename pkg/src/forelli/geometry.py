"""Moebius geometry of the unit ball in C^2 and of the unit disc.

Points of C^2 are handled as complex arrays whose leading axis has length 2,
so ``z[0]`` and ``z[1]`` are the two coordinates and any trailing shape is
broadcast.  All objects here are immutable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

EPS_GEOM = 1e-12
_DENOM_FLOOR = 1e-14


class GeometryError(ValueError):
    """Raised for points outside the admissible domain of an operation."""


class DegenerateConfiguration(GeometryError):
    pass


def as_point(z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    if z.shape[:1] != (2,):
        raise GeometryError(f"expected a point of C^2, got shape {z.shape}")
    if not np.all(np.isfinite(z)):
        raise GeometryError("non-finite coordinates")
    return z


def norm_sq(z) -> np.ndarray:
    z = np.asarray(z)
    return np.abs(z[0]) ** 2 + np.abs(z[1]) ** 2


def inner(z, w):
    """Hermitian product <z, w> = z1 conj(w1) + z2 conj(w2)."""
    return z[0] * np.conj(w[0]) + z[1] * np.conj(w[1])


def _check_disc_parameter(c: complex) -> complex:
    c = complex(c)
    if not (math.isfinite(c.real) and math.isfinite(c.imag)) or abs(c) >= 1.0:
        raise GeometryError(f"automorphism parameter must lie in the open unit disc, got {c}")
    return c


def disc_automorphism_apply(c, z):
    """omega_c(z) = (z + c) / (1 + conj(c) z)."""
    c = _check_disc_parameter(c)
    z = np.asarray(z, dtype=complex)
    denom = 1.0 + np.conj(c) * z
    if np.any(np.abs(denom) < _DENOM_FLOOR):
        raise GeometryError("degenerate denominator in disc automorphism")
    out = (z + c) / denom
    return out[()] if out.ndim == 0 else out


def axis_automorphism_apply(c1, z):
    """Ball automorphism along the z1-axis sending 0 to (c1, 0)."""
    c1 = _check_disc_parameter(c1)
    z = np.asarray(z, dtype=complex)
    denom = 1.0 + np.conj(c1) * z[0]
    if np.any(np.abs(denom) < _DENOM_FLOOR):
        raise GeometryError("degenerate denominator in axis automorphism")
    s = math.sqrt(1.0 - abs(c1) ** 2)
    return np.stack([(z[0] + c1) / denom, s * z[1] / denom])


def unitary_sending_e1_to(u) -> np.ndarray:
    """A unitary matrix whose first column is the unit vector ``u``."""
    u1, u2 = complex(u[0]), complex(u[1])
    return np.array([[u1, -np.conj(u2)], [u2, np.conj(u1)]], dtype=complex)


@dataclass(frozen=True)
class BallMobius:
    """Composition of unitaries and axis automorphisms.

    ``steps`` is applied left to right; each step is ``("unitary", U)`` with a
    2x2 unitary matrix or ``("axis", c1)`` with ``|c1| < 1``.
    """

    steps: tuple = ()

    def __call__(self, z) -> np.ndarray:
        w = np.asarray(z, dtype=complex)
        for kind, par in self.steps:
            if kind == "unitary":
                w = np.tensordot(par, w, axes=(1, 0))
            else:
                w = axis_automorphism_apply(par, w)
        return w

    def inverse(self) -> "BallMobius":
        inv = []
        for kind, par in reversed(self.steps):
            if kind == "unitary":
                inv.append(("unitary", np.conj(par).T))
            else:
                inv.append(("axis", -par))
        return BallMobius(tuple(inv))

    def then(self, other: "BallMobius") -> "BallMobius":
        """The map z -> other(self(z))."""
        return BallMobius(self.steps + other.steps)

    @property
    def is_identity(self) -> bool:
        return not self.steps


IDENTITY = BallMobius()


def unitary_map(U) -> BallMobius:
    U = np.asarray(U, dtype=complex)
    if not np.allclose(np.conj(U).T @ U, np.eye(2), atol=EPS_GEOM):
        raise GeometryError("matrix is not unitary")
    return BallMobius((("unitary", U),))


def ball_automorphism(a) -> BallMobius:
    """Automorphism phi of the ball with phi(0) = a.

    Built as the axis automorphism with parameter |a| followed by a unitary
    rotating e1 onto a/|a|.
    """
    a = as_point(a)
    na = math.sqrt(float(norm_sq(a)))
    if na >= 1.0 - EPS_GEOM:
        raise GeometryError(f"vertex must be interior, |a| = {na}")
    if na == 0.0:
        return IDENTITY
    steps = [("axis", complex(na))]
    if a[1] != 0 or a[0].imag != 0 or a[0].real < 0:
        steps.append(("unitary", unitary_sending_e1_to(a / na)))
    return BallMobius(tuple(steps))


def align_to_axis(a, b) -> BallMobius:
    """Automorphism psi with psi(a), psi(b) both on the z1-axis."""
    a, b = as_point(a), as_point(b)
    for p in (a, b):
        if norm_sq(p) >= 1.0 - EPS_GEOM:
            raise GeometryError("both points must be interior")
    if np.allclose(a, b, rtol=0.0, atol=EPS_GEOM):
        raise DegenerateConfiguration("align_to_axis needs two distinct points")
    if a[1] == 0 and b[1] == 0:
        return IDENTITY
    to_origin = ball_automorphism(a).inverse()
    bp = to_origin(b)
    nb = math.sqrt(float(norm_sq(bp)))
    V = np.conj(unitary_sending_e1_to(bp / nb)).T
    return to_origin.then(unitary_map(V))


@dataclass(frozen=True)
class LineBoundaryCircle:
    lambda0: complex
    rho: float


@dataclass(frozen=True)
class ComplexLine:
    """The line lambda -> base + lambda * dir, kept in canonical form."""

    base: tuple
    dir: tuple

    def point(self, lam) -> np.ndarray:
        lam = np.asarray(lam, dtype=complex)
        return np.stack([self.base[0] + lam * self.dir[0], self.base[1] + lam * self.dir[1]])

    def key(self) -> tuple:
        return (
            round(self.base[0].real, 12), round(self.base[0].imag, 12),
            round(self.base[1].real, 12), round(self.base[1].imag, 12),
            round(self.dir[0].real, 12), round(self.dir[0].imag, 12),
            round(self.dir[1].real, 12), round(self.dir[1].imag, 12),
        )


def canonical_direction(d) -> tuple:
    d1, d2 = complex(d[0]), complex(d[1])
    n = math.sqrt(abs(d1) ** 2 + abs(d2) ** 2)
    if n == 0.0 or not math.isfinite(n):
        raise GeometryError("direction must be a nonzero finite vector")
    if abs(n - 1.0) > 1e-14:
        d1, d2 = d1 / n, d2 / n
    k = 0 if abs(d1) >= abs(d2) * (1.0 - 1e-12) else 1
    dk = (d1, d2)[k]
    if not (dk.imag == 0.0 and dk.real > 0.0):
        phase = dk.conjugate() / abs(dk)
        d1, d2 = d1 * phase, d2 * phase
        if k == 0:
            d1 = complex(abs(dk), 0.0)
        else:
            d2 = complex(abs(dk), 0.0)
    return (d1, d2)


def make_line(base, direction) -> ComplexLine:
    base = as_point(base)
    return ComplexLine((complex(base[0]), complex(base[1])), canonical_direction(direction))


def canonical(line: ComplexLine) -> ComplexLine:
    return ComplexLine(line.base, canonical_direction(line.dir))


def line_through(p, q) -> ComplexLine:
    p, q = as_point(p), as_point(q)
    return make_line(p, q - p)


def line_boundary_circle(line: ComplexLine) -> LineBoundaryCircle:
    """Center and radius of {lambda : |base + lambda dir| = 1}."""
    p, d = line.base, line.dir
    pp = abs(p[0]) ** 2 + abs(p[1]) ** 2
    if pp >= 1.0 - EPS_GEOM:
        raise GeometryError("line base point must be strictly inside the ball")
    dd = abs(d[0]) ** 2 + abs(d[1]) ** 2
    pd = p[0] * d[0].conjugate() + p[1] * d[1].conjugate()
    # |p + lam d|^2 = 1 with |d| = 1 up to rounding
    lambda0 = -pd / dd
    rho = math.sqrt((1.0 - pp) / dd + abs(lambda0) ** 2)
    return LineBoundaryCircle(complex(lambda0), rho)


@dataclass(frozen=True)
class HyperbolicCircle:
    c: complex
    r: float

    @property
    def euclidean(self) -> tuple[complex, float]:
        return hyperbolic_to_euclidean(self.c, self.r)


def hyperbolic_to_euclidean(c, r) -> tuple[complex, float]:
    """Euclidean center and radius of omega_c({|z| = r})."""
    c = _check_disc_parameter(c)
    r = float(r)
    if not 0.0 < r < 1.0:
        raise GeometryError(f"hyperbolic radius must lie in (0, 1), got {r}")
    q = 1.0 - abs(c) ** 2 * r * r
    e = c * (1.0 - r * r) / q
    t = r * (1.0 - abs(c) ** 2) / q
    return e, t


def random_sphere_points(rng: np.random.Generator, n: int) -> np.ndarray:
    x = rng.standard_normal((2, n)) + 1j * rng.standard_normal((2, n))
    return x / np.sqrt(norm_sq(x))


def random_ball_points(rng: np.random.Generator, n: int, rmax: float = 0.9) -> np.ndarray:
    s = random_sphere_points(rng, n)
    return s * (rmax * rng.random(n) ** 0.25)


def random_unitary(rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))
