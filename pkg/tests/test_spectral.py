import numpy as np
import pytest

from forelli.spectral import (
    FAIL,
    INCONCLUSIVE,
    PASS,
    check_negative_coefficients,
    circle_nodes,
    classify,
    periodic_fourier_coeffs,
)


def test_single_mode():
    c = periodic_fourier_coeffs(circle_nodes(16), range(-7, 8))
    assert c[1] == pytest.approx(1, abs=1e-15)
    assert max(abs(v) for m, v in c.items() if m != 1) < 1e-15


def test_constant_and_negative_mode():
    c = periodic_fourier_coeffs(np.full(16, 2 - 1j), range(-3, 4))
    assert c[0] == pytest.approx(2 - 1j)
    assert periodic_fourier_coeffs(3 * circle_nodes(32) ** -2, [-2])[-2] == pytest.approx(3)


def test_rejects_aliased_index_and_bad_length():
    with pytest.raises(ValueError):
        periodic_fourier_coeffs(np.ones(16), [8])
    with pytest.raises(ValueError):
        periodic_fourier_coeffs(np.ones(12), [0])


def test_classify():
    assert classify(np.array([1e-12]), np.array([1e-14]), 1e-8) == PASS
    assert classify(np.array([0.1]), np.array([1e-14]), 1e-8) == FAIL
    assert classify(np.array([1e-6]), np.array([1e-6]), 1e-8) == INCONCLUSIVE


def test_trig_polynomial_spectral_exactness():
    def g(w):
        return 1 + 2 * w ** 3 + 0.5 * np.conj(w) ** 2

    chk = check_negative_coefficients(g, 64, range(-1, -17, -1), 1e-8)
    assert chk.verdict == FAIL
    assert chk.aliasing_estimate < 1e-13
    assert chk.coeffs[1] == pytest.approx(0.5)


def test_aliasing_dominated_data_is_inconclusive():
    # w^15 folds onto index -1 at N = 16 but not at N = 32
    def g(w):
        return 1e-6 * w ** 15

    assert check_negative_coefficients(g, 16, range(-1, -5, -1), 1e-8).verdict == INCONCLUSIVE
