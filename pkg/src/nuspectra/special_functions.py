"""Special functions module for orthogonal polynomials and quadrature.

The polynomials are evaluated with their three-term recurrences, which stay
stable for degrees well beyond the factorial sums. All functions accept a
scalar or a numpy array for the argument and return the same shape.

Example:
    >>> from nuspectra.special_functions import laguerre, jacobi
    >>> laguerre(1, 1.0, 0.5)
    1.5
    >>> jacobi(1, 0.0, 0.0, 0.5)
    0.5
"""
from typing import Sequence, Union

import numpy as np
from scipy.integrate import simpson, trapezoid
from scipy.special import gammaln

from .exceptions import DomainError

ArrayLike = Union[float, np.ndarray]


def _as_output(value: np.ndarray) -> ArrayLike:
    """Return a python float for 0-d results, the array otherwise.

    Args:
        value: Evaluated polynomial values

    Returns:
        Float or array
    """
    if value.ndim == 0:
        return float(value)
    return value


def _check_degree(n: int) -> None:
    if n < 0:
        raise DomainError(f"Polynomial degree must be non-negative, got {n}.")


def _check_order(name: str, order: float) -> None:
    if not order > -1.0:
        raise DomainError(
            f"Order {name}={order} must exceed -1; the weight is not integrable."
        )


def laguerre(n: int, beta: float, x: ArrayLike) -> ArrayLike:
    """Evaluate the generalized Laguerre polynomial L_n^(beta)(x).

    Args:
        n: Polynomial degree
        beta: Laguerre order, beta > -1
        x: Argument, scalar or array

    Returns:
        L_n^(beta)(x) with the shape of x
    """
    _check_degree(n)
    _check_order("beta", beta)

    x = np.asarray(x, dtype=float)
    previous = np.ones_like(x)
    if n == 0:
        return _as_output(previous)

    current = 1.0 + beta - x
    for k in range(2, n + 1):
        previous, current = (
            current,
            ((2 * k - 1 + beta - x) * current - (k - 1 + beta) * previous) / k,
        )
    return _as_output(current)


def jacobi(n: int, p: float, q: float, x: ArrayLike) -> ArrayLike:
    """Evaluate the Jacobi polynomial P_n^(p,q)(x).

    Args:
        n: Polynomial degree
        p: First order, p > -1
        q: Second order, q > -1
        x: Argument, scalar or array

    Returns:
        P_n^(p,q)(x) with the shape of x
    """
    _check_degree(n)
    _check_order("p", p)
    _check_order("q", q)

    x = np.asarray(x, dtype=float)
    previous = np.ones_like(x)
    if n == 0:
        return _as_output(previous)

    current = (p + 1.0) + (p + q + 2.0) * (x - 1.0) / 2.0
    for k in range(2, n + 1):
        total = 2 * k + p + q
        a = 2 * k * (k + p + q) * (total - 2)
        b = (total - 1) * (total * (total - 2) * x + p * p - q * q)
        c = 2 * (k + p - 1) * (k + q - 1) * total
        previous, current = current, (b * current - c * previous) / a
    return _as_output(current)


def generalized_binomial(top: float, k: int) -> float:
    """Binomial coefficient C(top, k) for real top via the log-Gamma function.

    Args:
        top: Upper argument, top > k - 1
        k: Lower argument

    Returns:
        C(top, k)
    """
    return float(
        np.exp(gammaln(top + 1.0) - gammaln(k + 1.0) - gammaln(top - k + 1.0))
    )


def laguerre_at_origin(n: int, beta: float) -> float:
    """Closed-form value L_n^(beta)(0) = C(n + beta, n).

    Args:
        n: Polynomial degree
        beta: Laguerre order

    Returns:
        L_n^(beta)(0)
    """
    _check_degree(n)
    _check_order("beta", beta)
    return generalized_binomial(n + beta, n)


def integrate_samples(values: Sequence[float], step: float) -> float:
    """Integrate uniformly spaced samples with the composite Simpson rule.

    An even sample count leaves one panel over, which is integrated with the
    trapezoid rule.

    Args:
        values: Function samples on a uniform grid
        step: Grid spacing

    Returns:
        Estimate of the integral over the sampled range

    Raises:
        DomainError: Fewer than two samples or a non-positive step
    """
    samples = np.asarray(values, dtype=float)
    if samples.size < 2:
        raise DomainError(f"At least 2 samples are required, got {samples.size}.")
    if not step > 0.0:
        raise DomainError(f"Sample spacing must be positive, got {step}.")

    if samples.size == 2:
        return float(trapezoid(samples, dx=step))
    if samples.size % 2 == 1:
        return float(simpson(samples, dx=step))
    return float(simpson(samples[:-1], dx=step) + trapezoid(samples[-2:], dx=step))
