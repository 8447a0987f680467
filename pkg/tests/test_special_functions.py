"""Test cases for the special functions module."""
import math

import numpy as np
import pytest
from scipy.special import eval_genlaguerre, eval_jacobi, gamma

from nuspectra import (
    DomainError,
    generalized_binomial,
    integrate_samples,
    jacobi,
    laguerre,
    laguerre_at_origin,
)


def test_laguerre_low_degree() -> None:
    """It returns the closed forms of the first polynomials."""
    assert laguerre(0, 0.5, 3.0) == 1.0
    assert laguerre(1, 1.0, 0.5) == pytest.approx(1.5, abs=1e-15)
    x = 0.7
    assert laguerre(2, 0.0, x) == pytest.approx((x * x - 4 * x + 2) / 2, abs=1e-15)


@pytest.mark.parametrize("beta", [0.0, 0.5, 1.0, 2.7])
def test_laguerre_matches_scipy(beta: float) -> None:
    """It agrees with scipy's generalized Laguerre polynomials."""
    x = np.linspace(0.0, 20.0, 201)
    for n in range(9):
        expected = eval_genlaguerre(n, beta, x)
        scale = np.max(np.abs(expected))
        np.testing.assert_allclose(
            laguerre(n, beta, x), expected, rtol=1e-10, atol=1e-12 * scale
        )


def test_laguerre_shape() -> None:
    """It returns a float for a scalar and an array for an array."""
    assert isinstance(laguerre(3, 0.5, 1.0), float)
    assert laguerre(3, 0.5, np.zeros((2, 3))).shape == (2, 3)


@pytest.mark.parametrize("beta", [0.0, 1.0, 2.7])
def test_laguerre_orthogonality(beta: float) -> None:
    """It is orthogonal with the weight x^beta exp(-x)."""
    x = np.linspace(0.0, 200.0, 20001)
    weight = x**beta * np.exp(-x)
    step = x[1] - x[0]
    norms = [gamma(n + beta + 1) / math.factorial(n) for n in range(7)]
    for m in range(7):
        for n in range(7):
            value = integrate_samples(
                weight * laguerre(m, beta, x) * laguerre(n, beta, x), step
            )
            if m == n:
                assert value == pytest.approx(norms[n], rel=1e-6)
            else:
                assert abs(value) / math.sqrt(norms[m] * norms[n]) < 1e-6


def test_laguerre_at_origin() -> None:
    """It returns the binomial value of the polynomial at zero."""
    for n in range(31):
        for beta in (0.0, 0.5, 1.0, 2.7):
            assert laguerre_at_origin(n, beta) == pytest.approx(
                laguerre(n, beta, 0.0), rel=1e-10
            )


def test_laguerre_invalid_order() -> None:
    """Should raise domain error for beta <= -1 or a negative degree."""
    with pytest.raises(DomainError):
        laguerre(2, -1.0, 0.5)
    with pytest.raises(DomainError):
        laguerre(-1, 0.0, 0.5)


@pytest.mark.parametrize("p,q", [(0.0, 0.0), (0.5, 1.5), (2.0, -0.5), (-0.3, 3.2)])
def test_jacobi_matches_scipy(p: float, q: float) -> None:
    """It agrees with scipy's Jacobi polynomials on [-1, 1]."""
    x = np.linspace(-1.0, 1.0, 101)
    for n in range(8):
        np.testing.assert_allclose(
            jacobi(n, p, q, x), eval_jacobi(n, p, q, x), rtol=1e-10, atol=1e-12
        )


def test_jacobi_at_one() -> None:
    """It returns C(n + p, n) at x = 1."""
    for n in range(6):
        assert jacobi(n, 1.5, 0.5, 1.0) == pytest.approx(
            generalized_binomial(n + 1.5, n), rel=1e-12
        )
    assert jacobi(1, 0.0, 0.0, 0.5) == pytest.approx(0.5, abs=1e-15)


def test_jacobi_invalid_order() -> None:
    """Should raise domain error for an order <= -1."""
    with pytest.raises(DomainError):
        jacobi(2, -1.0, 0.0, 0.5)
    with pytest.raises(DomainError):
        jacobi(2, 0.0, -1.5, 0.5)


def test_generalized_binomial() -> None:
    """It reproduces integer binomials."""
    assert generalized_binomial(5.0, 2) == pytest.approx(10.0, rel=1e-12)
    assert generalized_binomial(7.0, 0) == pytest.approx(1.0, rel=1e-12)


def test_integrate_samples() -> None:
    """It integrates polynomials exactly for odd and even sample counts."""
    x = np.linspace(0.0, 1.0, 11)
    assert integrate_samples(x**3, x[1] - x[0]) == pytest.approx(0.25, abs=1e-14)
    x = np.linspace(0.0, 1.0, 10)
    assert integrate_samples(x, x[1] - x[0]) == pytest.approx(0.5, abs=1e-14)
    assert integrate_samples([1.0, 3.0], 0.5) == pytest.approx(1.0, abs=1e-15)


def test_integrate_samples_invalid() -> None:
    """Should raise domain error for too few samples or a bad step."""
    with pytest.raises(DomainError):
        integrate_samples([1.0], 0.1)
    with pytest.raises(DomainError):
        integrate_samples([1.0, 2.0, 3.0], 0.0)
