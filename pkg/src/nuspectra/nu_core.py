"""NU core module for the parametric Nikiforov-Uvarov solver.

The parametric method handles any equation of the standard form

    Psi'' + (a1 - a2 s) / (s (1 - a3 s)) Psi'
          + (-xi1 s^2 + xi2 s - xi3) / (s^2 (1 - a3 s)^2) Psi = 0

through six coefficients. Ten derived parameters then give the energy
condition and the polynomial solution in closed form.

Example:
    >>> from nuspectra.nu_core import NuInput, derive_parameters
    >>> derived = derive_parameters(NuInput(1.0, 0.0, 0.0, 1.0, 2.0, 0.25))
    >>> derived.alpha10, derived.alpha11, derived.alpha12, derived.alpha13
    (2.0, 2.0, 0.5, -1.0)
"""
from dataclasses import dataclass
import math
from typing import Callable, Tuple

import numpy as np
from scipy.optimize import bisect

from .exceptions import (
    ComplexBranchError,
    DomainError,
    NoConvergenceError,
    NonNormalizableError,
    NoSignChangeError,
)
from .special_functions import ArrayLike, jacobi, laguerre

RADICAND_TOLERANCE = 1e-12
ENERGY_TOLERANCE = 1e-12
MAX_ITERATIONS = 200


def _root(name: str, radicand: float) -> float:
    """Square root that clamps floating-point noise just below zero.

    Args:
        name: Parameter name used in the error message
        radicand: Value under the root

    Returns:
        The non-negative square root

    Raises:
        ComplexBranchError: Radicand below -RADICAND_TOLERANCE
    """
    if radicand < 0.0:
        if radicand >= -RADICAND_TOLERANCE:
            return 0.0
        raise ComplexBranchError(f"complex NU branch: {name}={radicand!r} < 0")
    return math.sqrt(radicand)


@dataclass(frozen=True)
class NuInput:
    """The six coefficients of the NU standard form."""

    alpha1: float
    alpha2: float
    alpha3: float
    xi1: float
    xi2: float
    xi3: float

    def __post_init__(self) -> None:
        """Reject non-finite coefficients.

        Raises:
            DomainError: A coefficient is NaN or infinite
        """
        for name, value in vars(self).items():
            if not math.isfinite(value):
                raise DomainError(f"NU coefficient {name}={value!r} is not finite.")


@dataclass(frozen=True)
class NuDerived:
    """The ten derived NU parameters, alpha4 through alpha13."""

    source: NuInput
    alpha4: float
    alpha5: float
    alpha6: float
    alpha7: float
    alpha8: float
    alpha9: float
    alpha10: float
    alpha11: float
    alpha12: float
    alpha13: float

    @property
    def sqrt_alpha8(self) -> float:
        """float, the square root of alpha8."""
        return _root("alpha8", self.alpha8)

    @property
    def sqrt_alpha9(self) -> float:
        """float, the square root of alpha9."""
        return _root("alpha9", self.alpha9)


@dataclass(frozen=True)
class WavefunctionForm:
    """Closed-form factors of a polynomial NU solution.

    For ``general_case`` false the solution reads
    ``s**power * exp(rate * s) * L_degree^(order)(scale * s)``. Otherwise the
    exponential is replaced by ``(1 - alpha3 s)**(-power - rate / alpha3)`` and
    the Laguerre factor by ``P_degree^(order, second_order)(1 - 2 alpha3 s)``.
    """

    power: float
    rate: float
    degree: int
    order: float
    scale: float
    general_case: bool = False
    alpha3: float = 0.0
    second_order: float = 0.0

    def evaluate(self, s: ArrayLike, with_power: bool = True) -> ArrayLike:
        """Evaluate the un-normalized solution.

        Args:
            s: Variable of the standard form, scalar or array, s >= 0
            with_power: Include the leading factor s**power

        Returns:
            Psi(s) with the shape of s
        """
        s = np.asarray(s, dtype=float)
        leading = np.power(s, self.power) if with_power else 1.0
        if not self.general_case:
            value = (
                leading
                * np.exp(self.rate * s)
                * laguerre(self.degree, self.order, self.scale * s)
            )
        else:
            exponent = -self.power - self.rate / self.alpha3
            value = (
                leading
                * np.exp(exponent * np.log1p(-self.alpha3 * s))
                * jacobi(
                    self.degree,
                    self.order,
                    self.second_order,
                    1.0 - 2.0 * self.alpha3 * s,
                )
            )
        if value.ndim == 0:
            return float(value)
        return value


def derive_parameters(nu_input: NuInput) -> NuDerived:
    """Compute the derived parameters alpha4 ... alpha13.

    Args:
        nu_input: The six standard-form coefficients

    Returns:
        The derived parameters

    Raises:
        ComplexBranchError: alpha8 or alpha9 is negative
    """
    a1, a2, a3 = nu_input.alpha1, nu_input.alpha2, nu_input.alpha3
    alpha4 = (1.0 - a1) / 2.0
    alpha5 = (a2 - 2.0 * a3) / 2.0
    alpha6 = alpha5**2 + nu_input.xi1
    alpha7 = 2.0 * alpha4 * alpha5 - nu_input.xi2
    alpha8 = alpha4**2 + nu_input.xi3
    alpha9 = alpha6 + a3 * alpha7 + a3**2 * alpha8

    root8 = _root("alpha8", alpha8)
    root9 = _root("alpha9", alpha9)
    return NuDerived(
        source=nu_input,
        alpha4=alpha4,
        alpha5=alpha5,
        alpha6=alpha6,
        alpha7=alpha7,
        alpha8=alpha8,
        alpha9=alpha9,
        alpha10=a1 + 2.0 * alpha4 + 2.0 * root8,
        alpha11=a2 - 2.0 * alpha5 + 2.0 * (root9 + a3 * root8),
        alpha12=alpha4 + root8,
        alpha13=alpha5 - (root9 + a3 * root8),
    )


def energy_residual_general(nu_input: NuInput, n: int) -> float:
    """Left-hand side of the general energy condition.

    A root in the energy, entering through the xi coefficients, is an
    eigenvalue with radial quantum number n.

    Args:
        nu_input: The six standard-form coefficients
        n: Radial quantum number

    Returns:
        The residual
    """
    d = derive_parameters(nu_input)
    a3 = nu_input.alpha3
    root8, root9 = d.sqrt_alpha8, d.sqrt_alpha9
    return (
        nu_input.alpha2 * n
        - (2 * n + 1) * d.alpha5
        + (2 * n + 1) * (root9 + a3 * root8)
        + n * (n - 1) * a3
        + d.alpha7
        + 2.0 * a3 * d.alpha8
        + 2.0 * root8 * root9
    )


def energy_residual_reduced(nu_input: NuInput, n: int) -> float:
    """Left-hand side of the energy condition for alpha3 = 0.

    Args:
        nu_input: The six standard-form coefficients, alpha3 = 0
        n: Radial quantum number

    Returns:
        The residual

    Raises:
        DomainError: alpha3 is not zero
    """
    if nu_input.alpha3 != 0.0:
        raise DomainError(
            f"The reduced energy condition needs alpha3 = 0, got {nu_input.alpha3!r}."
        )
    d = derive_parameters(nu_input)
    root8, root9 = d.sqrt_alpha8, d.sqrt_alpha9
    return (
        n * nu_input.alpha2
        - (2 * n + 1) * d.alpha5
        + (2 * n + 1) * root9
        + d.alpha7
        + 2.0 * root8 * root9
    )


def solve_energy(
    family_mapper: Callable[[float], NuInput],
    n: int,
    bracket: Tuple[float, float],
) -> float:
    """Find the energy whose NU coefficients satisfy the energy condition.

    Args:
        family_mapper: Pure function from energy to standard-form coefficients
        n: Radial quantum number
        bracket: Energies (lo, hi) with residuals of opposite sign

    Returns:
        The root energy to ENERGY_TOLERANCE

    Raises:
        NoSignChangeError: The bracket does not straddle a root
        NoConvergenceError: MAX_ITERATIONS exceeded
    """

    def residual(energy: float) -> float:
        nu_input = family_mapper(energy)
        if nu_input.alpha3 == 0.0:
            return energy_residual_reduced(nu_input, n)
        return energy_residual_general(nu_input, n)

    lo, hi = bracket
    f_lo, f_hi = residual(lo), residual(hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if np.sign(f_lo) == np.sign(f_hi):
        raise NoSignChangeError(
            f"no sign change: residual({lo!r})={f_lo!r}, residual({hi!r})={f_hi!r}"
        )

    root, result = bisect(
        residual,
        lo,
        hi,
        xtol=ENERGY_TOLERANCE,
        maxiter=MAX_ITERATIONS,
        full_output=True,
        disp=False,
    )
    if not result.converged:
        raise NoConvergenceError(
            f"no convergence after {result.iterations} bisection steps"
        )
    return float(root)


def wavefunction_form(derived: NuDerived, n: int) -> WavefunctionForm:
    """Assemble the polynomial solution for radial quantum number n.

    Args:
        derived: Derived NU parameters
        n: Radial quantum number, the polynomial degree

    Returns:
        The wavefunction factors

    Raises:
        NonNormalizableError: alpha3 = 0 and the exponential does not decay
    """
    a3 = derived.source.alpha3
    if a3 == 0.0:
        if derived.alpha13 >= 0.0:
            raise NonNormalizableError(
                f"non-normalizable: exponential rate {derived.alpha13!r} >= 0"
            )
        return WavefunctionForm(
            power=derived.alpha12,
            rate=derived.alpha13,
            degree=n,
            order=derived.alpha10 - 1.0,
            scale=derived.alpha11,
        )

    return WavefunctionForm(
        power=derived.alpha12,
        rate=derived.alpha13,
        degree=n,
        order=derived.alpha10 - 1.0,
        scale=derived.alpha11,
        general_case=True,
        alpha3=a3,
        second_order=derived.alpha11 / a3 - derived.alpha10 - 1.0,
    )
