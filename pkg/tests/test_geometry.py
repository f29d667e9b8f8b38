import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from forelli.geometry import (
    DegenerateConfiguration,
    GeometryError,
    HyperbolicCircle,
    align_to_axis,
    axis_automorphism_apply,
    ball_automorphism,
    canonical,
    disc_automorphism_apply,
    hyperbolic_to_euclidean,
    line_boundary_circle,
    make_line,
    norm_sq,
    random_ball_points,
    random_sphere_points,
    random_unitary,
    unitary_map,
)

disc_pts = st.builds(lambda r, a: r * complex(math.cos(a), math.sin(a)),
                     st.floats(0, 0.95), st.floats(0, 2 * math.pi))


def test_disc_automorphism_examples():
    assert disc_automorphism_apply(0, 0.3 + 0.4j) == pytest.approx(0.3 + 0.4j)
    assert disc_automorphism_apply(0.5, 0) == pytest.approx(0.5)
    assert disc_automorphism_apply(0.5, 0.5) == pytest.approx(0.8)


def test_disc_automorphism_keeps_circle():
    z = np.exp(2j * np.pi * np.arange(32) / 32)
    assert np.allclose(np.abs(disc_automorphism_apply(0.3 - 0.6j, z)), 1.0, atol=1e-14)


def test_disc_automorphism_rejects_bad_parameter():
    with pytest.raises(GeometryError):
        disc_automorphism_apply(1.0, 0.2)


@given(disc_pts, disc_pts)
def test_disc_group_property(c, z):
    assert abs(disc_automorphism_apply(-c, disc_automorphism_apply(c, z)) - z) < 1e-12


def test_axis_automorphism_examples():
    assert np.allclose(axis_automorphism_apply(0, np.array([0.1, 0.2j])), [0.1, 0.2j])
    assert np.allclose(axis_automorphism_apply(0.5, np.zeros(2)), [0.5, 0])
    w = axis_automorphism_apply(0.5, np.array([0.5, 0.5]))
    assert np.allclose(w, [0.8, 0.34641016151377546], atol=1e-14)
    assert norm_sq(w) == pytest.approx(0.76, abs=1e-14)


def test_automorphisms_preserve_sphere():
    rng = np.random.default_rng(1)
    worst = 0.0
    for _ in range(100):
        om = unitary_map(random_unitary(rng)).then(ball_automorphism(random_ball_points(rng, 1, 0.9)[:, 0]))
        zeta = random_sphere_points(rng, 1)[:, 0]
        worst = max(worst, abs(norm_sq(om(zeta)) - 1.0))
    assert worst < 1e-11


def test_ball_automorphism_examples():
    assert ball_automorphism(np.zeros(2)).is_identity
    z = np.array([0.1 + 0.2j, -0.3j])
    assert np.allclose(ball_automorphism(np.array([0.5, 0]))(z), axis_automorphism_apply(0.5, z))
    a = np.array([0, 0.3j])
    phi = ball_automorphism(a)
    assert np.allclose(phi(np.zeros(2)), a, atol=1e-15)
    zeta = random_sphere_points(np.random.default_rng(2), 10)
    assert np.allclose(norm_sq(phi(zeta)), 1.0, atol=1e-12)


def test_ball_automorphism_rejects_boundary():
    with pytest.raises(GeometryError):
        ball_automorphism(np.array([0.6, 0.8]))


def test_inverse_composition_is_identity():
    rng = np.random.default_rng(3)
    for _ in range(20):
        om = unitary_map(random_unitary(rng)).then(ball_automorphism(random_ball_points(rng, 1, 0.8)[:, 0]))
        z = random_ball_points(rng, 5, 0.99)
        assert np.allclose(om.inverse()(om(z)), z, atol=1e-12)


def test_align_to_axis_examples():
    assert align_to_axis(np.array([0.2, 0]), np.array([-0.4, 0])).is_identity
    psi = align_to_axis(np.zeros(2), np.array([0, 0.5]))
    assert abs(psi(np.zeros(2))[1]) < 1e-15 and abs(psi(np.array([0, 0.5]))[1]) < 1e-15
    a, b = np.array([0.1 + 0.1j, 0.2]), np.array([-0.2, 0.1j])
    psi = align_to_axis(a, b)
    assert abs(psi(a)[1]) + abs(psi(b)[1]) < 1e-12


def test_align_to_axis_degenerate():
    with pytest.raises(DegenerateConfiguration):
        align_to_axis(np.array([0.1, 0.2]), np.array([0.1, 0.2]))


@pytest.mark.parametrize("p,d,lam0,rho", [
    ((0, 0), (1, 0), 0, 1.0),
    ((0.5, 0), (0, 1), 0, math.sqrt(0.75)),
    ((0.5, 0), (1, 0), -0.5, 1.0),
])
def test_line_boundary_circle_examples(p, d, lam0, rho):
    line = make_line(np.array(p, complex), np.array(d, complex))
    circ = line_boundary_circle(line)
    assert circ.lambda0 == pytest.approx(lam0, abs=1e-15)
    assert circ.rho == pytest.approx(rho, abs=1e-15)
    lam = circ.lambda0 + circ.rho * np.exp(2j * np.pi * np.arange(64) / 64)
    assert np.max(np.abs(np.sqrt(norm_sq(line.point(lam))) - 1)) < 1e-12


def test_line_boundary_circle_random_lines():
    rng = np.random.default_rng(4)
    worst = 0.0
    for _ in range(100):
        line = make_line(random_ball_points(rng, 1, 0.95)[:, 0], random_sphere_points(rng, 1)[:, 0])
        circ = line_boundary_circle(line)
        lam = circ.lambda0 + circ.rho * np.exp(2j * np.pi * np.arange(32) / 32)
        worst = max(worst, np.max(np.abs(norm_sq(line.point(lam)) - 1)))
    assert worst < 1e-11


def test_line_boundary_circle_rejects_boundary_base():
    line = make_line(np.array([1.0, 0]), np.array([0, 1.0]))
    with pytest.raises(GeometryError):
        line_boundary_circle(line)


@given(st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
       st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False))
def test_canonicalization_idempotent(d1, d2):
    if abs(d1) + abs(d2) < 1e-6:
        return
    line = make_line(np.array([0.1, -0.2j]), np.array([d1, d2]))
    once = canonical(line)
    assert canonical(once) == once
    k = 0 if abs(once.dir[0]) >= abs(once.dir[1]) * (1 - 1e-12) else 1
    assert once.dir[k].imag == 0 and once.dir[k].real > 0


@pytest.mark.parametrize("c,r,e,t", [
    (0, 0.5, 0, 0.5),
    (0.5, 0.5, 0.4, 0.4),
    (0.3j, 0.8, 0.1146010j, 0.7724958),
])
def test_hyperbolic_to_euclidean_examples(c, r, e, t):
    ee, tt = hyperbolic_to_euclidean(c, r)
    assert ee == pytest.approx(e, abs=1e-7)
    assert tt == pytest.approx(t, abs=1e-7)


@settings(max_examples=50)
@given(disc_pts, st.floats(0.01, 0.99))
def test_hyperbolic_circle_is_image_of_circle(c, r):
    e, t = HyperbolicCircle(c, r).euclidean
    w = disc_automorphism_apply(c, r * np.exp(2j * np.pi * np.arange(64) / 64))
    assert np.max(np.abs(np.abs(w - e) - t)) < 1e-11
    assert abs(e) + t <= 1 + 1e-12
