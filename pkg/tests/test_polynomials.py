"""
Polynomial height tests
"""

import numpy as np
import pytest

from carnot_lab.polynomials import Polynomial, fit_taylor, monomials_up_to


@pytest.fixture
def p():
    # 1 + 2 z1 - z1^2 z2 + 3 z2^2
    return Polynomial({(0, 0): 1.0, (1, 0): 2.0, (2, 1): -1.0, (0, 2): 3.0})


def test_evaluation(p):
    z = np.array([[0.0, 0.0], [1.0, 2.0], [-1.5, 0.5]])
    expected = 1 + 2 * z[:, 0] - z[:, 0] ** 2 * z[:, 1] + 3 * z[:, 1] ** 2
    np.testing.assert_allclose(p(z), expected)


def test_zero_polynomial():
    zero = Polynomial.zero(3)
    assert zero(np.ones((4, 3))).shape == (4,)
    assert not zero.terms
    with pytest.raises(ValueError):
        Polynomial({})


def test_zero_coefficients_are_dropped():
    assert Polynomial({(1, 0): 0.0, (0, 1): 2.0}).terms == {(0, 1): 2.0}


def test_derivative_and_gradient(p):
    assert p.derivative(0).terms == {(0, 0): 2.0, (1, 1): -2.0}
    assert p.derivative(1, 2).terms == {(0, 0): 6.0}
    z = np.array([1.0, 2.0])
    np.testing.assert_allclose(p.gradient(z), [2.0 - 2.0 * 1.0 * 2.0, -1.0 + 12.0])


def test_arithmetic(p):
    q = Polynomial.linear([1.0, -1.0], constant=2.0)
    z = np.array([[0.3, -0.7], [2.0, 1.0]])
    np.testing.assert_allclose((p + q)(z), p(z) + q(z))
    np.testing.assert_allclose((p * q)(z), p(z) * q(z))
    np.testing.assert_allclose(p.scaled(-2.5)(z), -2.5 * p(z))


def test_shift_and_compose(p):
    z = np.array([[0.3, -0.7], [2.0, 1.0]])
    np.testing.assert_allclose(p.shifted([1.0, -2.0])(z), p(z + np.array([1.0, -2.0])))
    inner = [Polynomial({(1, 0): 1.0, (0, 1): 1.0}), Polynomial({(1, 1): 1.0})]
    composed = p.compose(inner)
    images = np.stack([inner[0](z), inner[1](z)], axis=-1)
    np.testing.assert_allclose(composed(z), p(images))
    with pytest.raises(ValueError):
        p.compose(inner[:1])


def test_weighted_dilation(p):
    weights = [1, 2]
    z = np.array([0.4, -0.9])
    t = 1.7
    np.testing.assert_allclose(p.dilated(weights, t)(z), p(np.array([t * z[0], t ** 2 * z[1]])))
    assert p.weighted_degrees(weights) == {(0, 0): 0, (0, 2): 4, (1, 0): 1, (2, 1): 4}
    assert p.part(weights, lambda d: d >= 4).terms == {(0, 2): 3.0, (2, 1): -1.0}


def test_config_keys(p):
    data = p.as_config()
    assert data["2,1"] == -1.0
    assert Polynomial.from_config(data, 2).terms == p.terms


def test_fit_taylor_recovers_polynomial(p):
    fitted = fit_taylor(p, nvars=2, degree=3)
    z = np.array([[0.1, -0.2], [0.05, 0.3]])
    np.testing.assert_allclose(fitted(z), p(z), atol=1e-8)


def test_monomials_up_to():
    assert sorted(monomials_up_to(2, 1)) == [(0, 0), (0, 1), (1, 0)]
    assert len(list(monomials_up_to(3, 2))) == 10
