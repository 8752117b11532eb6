import math

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from mzinfo.core import (PhasePolynomial, TrigSpectrum, abs_square, poly_mul, poly_pow,
                         spectrum_derivative)

PHASES = np.linspace(-math.pi, math.pi, 64, endpoint=False)

finite = st.floats(-3, 3, allow_nan=False, allow_infinity=False)
cplx = st.builds(complex, finite, finite)
polys = st.lists(cplx, min_size=0, max_size=6).map(PhasePolynomial)


def coeffs_close(a, b, tol):
    n = max(a.coeffs.size, b.coeffs.size)
    pa = np.pad(a.coeffs, (0, n - a.coeffs.size))
    pb = np.pad(b.coeffs, (0, n - b.coeffs.size))
    return np.max(np.abs(pa - pb), initial=0.0) < tol


def test_mul_identity():
    one = PhasePolynomial.constant(1)
    assert np.array_equal(poly_mul(one, one).coeffs, [1])


def test_mul_hand_expansion():
    a = PhasePolynomial([1, 2])
    b = PhasePolynomial([0, 3])
    assert np.allclose(poly_mul(a, b).coeffs, [0, 3, 6], atol=0)


def test_square_of_half_one_minus_z_matches_sympy():
    z = sympy.symbols("z")
    expected = sympy.Poly(sympy.expand(((1 - z) / 2) ** 2), z).all_coeffs()[::-1]
    expected = [complex(c) for c in expected]
    got = poly_mul(PhasePolynomial([0.5, -0.5]), PhasePolynomial([0.5, -0.5]))
    assert np.allclose(got.coeffs, expected, atol=1e-15)
    assert np.allclose(got.coeffs, [0.25, -0.5, 0.25], atol=1e-15)


def test_pow_cases():
    a = PhasePolynomial([1.5, 2j])
    assert np.array_equal(poly_pow(a, 0).coeffs, [1])
    assert np.array_equal(poly_pow(PhasePolynomial.monomial(1), 3).coeffs, [0, 0, 0, 1])
    binom = [math.comb(4, k) for k in range(5)]
    assert np.allclose(poly_pow(PhasePolynomial([1, 1]), 4).coeffs, binom, atol=0)
    with pytest.raises(ValueError):
        poly_pow(a, -1)


def test_zero_polynomial_is_canonical():
    z = PhasePolynomial([0, 0, 0])
    assert z.is_zero() and z.degree == -1
    assert PhasePolynomial([1, 2, 1e-20]).degree == 1
    assert poly_mul(z, PhasePolynomial([1, 2])).is_zero()


def test_nonfinite_rejected():
    with pytest.raises(ValueError):
        PhasePolynomial([1, np.nan])
    with pytest.raises(ValueError):
        TrigSpectrum(np.inf, [], [])


@settings(max_examples=60, deadline=None)
@given(polys, polys, polys)
def test_mul_commutative_associative(a, b, c):
    assert coeffs_close(poly_mul(a, b), poly_mul(b, a), 1e-13)
    assert coeffs_close(poly_mul(poly_mul(a, b), c), poly_mul(a, poly_mul(b, c)), 1e-12)


def test_abs_square_constant():
    s = abs_square(PhasePolynomial([1]))
    assert np.allclose(s(PHASES), 1.0, atol=1e-15)


def test_abs_square_single_photon_amplitude():
    s = abs_square(PhasePolynomial([0.5j, -0.5j]))
    assert np.max(np.abs(s(PHASES) - np.sin(PHASES / 2) ** 2)) < 1e-15
    assert np.max(np.abs(s(PHASES) - (1 - np.cos(PHASES)) / 2)) < 1e-15


def test_abs_square_random_polynomials_pointwise():
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(100):
        c = rng.normal(size=4) + 1j * rng.normal(size=4)
        a = PhasePolynomial(c)
        direct = np.abs(np.polyval(c[::-1], np.exp(1j * PHASES))) ** 2
        worst = max(worst, np.max(np.abs(abs_square(a)(PHASES) - direct)))
        assert np.all(abs_square(a)(np.linspace(-math.pi, math.pi, 1024)) >= -1e-12)
    assert worst < 1e-12


@settings(max_examples=40, deadline=None)
@given(polys)
def test_abs_square_nonnegative(a):
    vals = abs_square(a)(np.linspace(-math.pi, math.pi, 1024))
    scale = max(1.0, float(np.sum(np.abs(a.coeffs)) ** 2))
    assert np.all(vals >= -1e-13 * scale)


def test_derivative_cases():
    assert spectrum_derivative(TrigSpectrum.constant(3.0))(PHASES).tolist() == [0.0] * 64
    s = abs_square(PhasePolynomial([0.5j, -0.5j]))
    assert np.max(np.abs(s.derivative()(PHASES) - np.sin(PHASES) / 2)) < 1e-15


def richardson(f, x, h):
    d1 = (f(x + h) - f(x - h)) / (2 * h)
    d2 = (f(x + h / 2) - f(x - h / 2)) / h
    return (4 * d2 - d1) / 3


def test_derivative_matches_finite_differences():
    rng = np.random.default_rng(3)
    for _ in range(20):
        c = rng.normal(size=5) + 1j * rng.normal(size=5)
        s = abs_square(PhasePolynomial(c))
        cd = (s(PHASES + 1e-5) - s(PHASES - 1e-5)) / 2e-5
        assert np.max(np.abs(s.derivative()(PHASES) - cd)) < 1e-8 * max(1, s.max_abs_coeff())
        rich = richardson(s, PHASES, 1e-3)
        assert np.max(np.abs(s.derivative()(PHASES) - rich)) < 1e-8 * max(1, s.max_abs_coeff())


def test_spectrum_arithmetic_and_shift():
    a = TrigSpectrum(0.5, [0.1, -0.2], [0.3])
    b = TrigSpectrum(0.25, [0.4], [0.0, 0.7])
    assert np.allclose((a + b)(PHASES), a(PHASES) + b(PHASES), atol=1e-15)
    assert np.allclose((2.5 * a)(PHASES), 2.5 * a(PHASES), atol=1e-15)
    assert np.allclose(a.shifted(0.7)(PHASES), a(PHASES + 0.7), atol=1e-14)


def test_values_are_immutable():
    a = PhasePolynomial([1, 2])
    with pytest.raises(ValueError):
        a.coeffs[0] = 5
