"""Potentials module for the four solvable potential families.

Each family is mapped onto the parametric NU standard form. That mapping gives
closed-form energies and radial wavefunctions for a particle whose orbital
quantum number is shifted by an Aharonov-Bohm flux, l -> l0 = l - flux.

The radial function R(r) enters through U = sqrt(r) R, which satisfies

    U'' + U'/r + [2M (E - V) / hbar^2 - J0^2 / r^2] U = 0,   J0 = l0 + 1/2.

Example:
    >>> from nuspectra.potentials import (
    ...     PhysicalScale, PotentialSpec, QuantumState, closed_form_energy
    ... )
    >>> level = closed_form_energy(
    ...     PotentialSpec.modified_coulomb(a=0.0, b=1.0),
    ...     QuantumState(n=1, l=0),
    ...     PhysicalScale(),
    ... )
    >>> level.energy
    -0.125
"""
from dataclasses import dataclass, replace
from enum import Enum
import math
from typing import Callable, Optional, Tuple

import numpy as np

from .exceptions import (
    DomainError,
    FallToCenterError,
    RegularityError,
    TailNotConvergedError,
    UnboundSystemError,
)
from .family import Family
from .nu_core import (
    derive_parameters,
    energy_residual_reduced,
    NuInput,
    solve_energy,
    wavefunction_form,
    WavefunctionForm,
)
from .source import Source
from .special_functions import ArrayLike, integrate_samples
from .table import SpectrumRow, SpectrumTable

TAIL_TOLERANCE = 1e-10
MIN_NORMALIZATION_SAMPLES = 1001
SKIPPED_REGULARITY = "skipped:J0<=0"
SKIPPED_UNBOUND = "skipped:unbound"


class Variable(str, Enum):
    """Independent variable of the assembled NU solution."""

    R = "r"
    S_EQUALS_OMEGA_R_SQUARED = "s=omega*r^2"


@dataclass(frozen=True)
class PhysicalScale:
    """Constants fixing the unit system, natural units by default."""

    hbar: float = 1.0
    mass: float = 1.0
    charge: float = 1.0

    def __post_init__(self) -> None:
        """Check that every constant is strictly positive.

        Raises:
            DomainError: A constant is not strictly positive
        """
        for name in ("hbar", "mass", "charge"):
            value = getattr(self, name)
            if not value > 0.0:
                raise DomainError(f"{name} must be strictly positive, got {value!r}.")

    @property
    def kinetic(self) -> float:
        """float, hbar^2 / 2M."""
        return self.hbar**2 / (2.0 * self.mass)

    @property
    def coupling(self) -> float:
        """float, 2M / hbar^2."""
        return 2.0 * self.mass / self.hbar**2

    @property
    def flux_quantum(self) -> float:
        """float, the flux quantum 2 pi hbar / e."""
        return 2.0 * math.pi * self.hbar / self.charge

    def flux_fraction(self, phi_ab: float) -> float:
        """Convert an Aharonov-Bohm flux to the dimensionless flux.

        Args:
            phi_ab: Enclosed magnetic flux

        Returns:
            phi_ab divided by the flux quantum
        """
        return phi_ab / self.flux_quantum


@dataclass(frozen=True)
class PotentialSpec:
    """A potential family and its real coefficients.

    Use the named constructors; each family only reads its own coefficients.
    """

    family: Family
    a: float = 0.0
    b: float = 0.0
    c: float = 0.0

    def __post_init__(self) -> None:
        """Reject coefficients the family does not carry.

        Raises:
            DomainError: Coefficient a for Kratzer, or c for Coulomb/oscillator
        """
        family = Family(self.family)
        if family is Family.KRATZER and self.a != 0.0:
            raise DomainError("The Kratzer-Fues potential has no constant offset a.")
        if family in (Family.COULOMB, Family.OSCILLATOR) and self.c != 0.0:
            raise DomainError(f"The {family.value} potential has no coefficient c.")
        object.__setattr__(self, "family", family)

    @classmethod
    def modified_coulomb(cls, a: float, b: float) -> "PotentialSpec":
        """V(r) = a - b/r."""
        return cls(Family.COULOMB, a=a, b=b)

    @classmethod
    def modified_oscillator(cls, a: float, b: float) -> "PotentialSpec":
        """V(r) = a + b r^2."""
        return cls(Family.OSCILLATOR, a=a, b=b)

    @classmethod
    def kratzer_fues(cls, b: float, c: float) -> "PotentialSpec":
        """V(r) = -b/r + c/r^2."""
        return cls(Family.KRATZER, b=b, c=c)

    @classmethod
    def mie_type(cls, a: float, b: float, c: float) -> "PotentialSpec":
        """V(r) = a - b/r + c/r^2."""
        return cls(Family.MIE, a=a, b=b, c=c)


@dataclass(frozen=True)
class QuantumState:
    """Radial and orbital quantum numbers under a dimensionless flux."""

    n: int
    l: int  # noqa: E741
    flux: float = 0.0
    m: Optional[int] = None

    def __post_init__(self) -> None:
        """Check the quantum numbers.

        Raises:
            DomainError: n or l negative
        """
        if self.n < 0 or self.l < 0:
            raise DomainError(
                f"Quantum numbers must be non-negative, got n={self.n}, l={self.l}."
            )

    @property
    def l0(self) -> float:
        """float, the flux-shifted orbital number l - flux."""
        return self.l - self.flux

    @property
    def j0(self) -> float:
        """float, J0 = l0 + 1/2."""
        return self.l0 + 0.5

    @property
    def lambda0(self) -> float:
        """float, the separation constant l0 (l0 + 1) = J0^2 - 1/4."""
        return self.l0 * (self.l0 + 1.0)

    @property
    def m0(self) -> Optional[float]:
        """Optional[float], the flux-shifted magnetic number m - flux."""
        if self.m is None:
            return None
        return self.m - self.flux

    def flux_partner(self, theta: int) -> "QuantumState":
        """State whose spectrum equals this one with the flux raised by theta.

        Args:
            theta: Whole number of flux quanta

        Returns:
            The state (n, l - theta, flux)
        """
        return QuantumState(n=self.n, l=self.l - theta, flux=self.flux, m=self.m)


@dataclass(frozen=True)
class EnergyLevel:
    """An energy eigenvalue with its quantum numbers and provenance."""

    state: QuantumState
    energy: float
    source: Source = Source.CLOSED_FORM

    @property
    def n(self) -> int:
        """int, the radial quantum number."""
        return self.state.n

    @property
    def l(self) -> int:  # noqa: E743
        """int, the orbital quantum number."""
        return self.state.l

    @property
    def flux(self) -> float:
        """float, the dimensionless flux."""
        return self.state.flux


@dataclass(frozen=True)
class RadialWavefunction:
    """A closed-form radial wavefunction and its normalization state."""

    spec: PotentialSpec
    state: QuantumState
    variable: Variable
    form: WavefunctionForm
    energy: float
    omega: float = 1.0
    norm_constant: Optional[float] = None

    def _scaled(self, r: ArrayLike, shift: float) -> ArrayLike:
        """Evaluate r^shift U(r) with the power of r factored out exactly.

        Args:
            r: Radial coordinate, scalar or array
            shift: Extra power of r

        Returns:
            The scaled function with the shape of r
        """
        r = np.asarray(r, dtype=float)
        if self.variable is Variable.R:
            argument, power, prefactor = r, self.form.power, 1.0
        else:
            argument = self.omega * r**2
            power = 2.0 * self.form.power
            prefactor = self.omega**self.form.power
        norm = 1.0 if self.norm_constant is None else self.norm_constant
        value = (
            norm
            * prefactor
            * np.power(r, power + shift)
            * self.form.evaluate(argument, with_power=False)
        )
        if value.ndim == 0:
            return float(value)
        return value

    def auxiliary(self, r: ArrayLike) -> ArrayLike:
        """U(r) = sqrt(r) R(r), the function solving the first-order form.

        Args:
            r: Radial coordinate

        Returns:
            U(r)
        """
        return self._scaled(r, 0.0)

    def radial(self, r: ArrayLike) -> ArrayLike:
        """R(r), the physical radial function.

        Args:
            r: Radial coordinate

        Returns:
            R(r)
        """
        return self._scaled(r, -0.5)

    def reduced(self, r: ArrayLike) -> ArrayLike:
        """u(r) = r R(r), the function solving the reduced equation.

        Args:
            r: Radial coordinate

        Returns:
            u(r)
        """
        return self._scaled(r, 0.5)


def potential_value(spec: PotentialSpec, r: ArrayLike) -> ArrayLike:
    """Evaluate V(r).

    Args:
        spec: Potential family and coefficients
        r: Radial coordinate, r > 0

    Returns:
        V(r) with the shape of r
    """
    r = np.asarray(r, dtype=float)
    if spec.family is Family.OSCILLATOR:
        value = spec.a + spec.b * r**2
    else:
        value = spec.a - spec.b / r + spec.c / r**2
    if value.ndim == 0:
        return float(value)
    return value


def effective_potential(
    spec: PotentialSpec, state: QuantumState, scale: PhysicalScale, r: ArrayLike
) -> ArrayLike:
    """V(r) plus the flux-shifted centrifugal term hbar^2 lambda0 / (2M r^2).

    Args:
        spec: Potential family and coefficients
        state: Quantum state supplying lambda0
        scale: Physical constants
        r: Radial coordinate, r > 0

    Returns:
        The effective potential with the shape of r
    """
    r = np.asarray(r, dtype=float)
    value = np.asarray(potential_value(spec, r)) + scale.kinetic * state.lambda0 / r**2
    if value.ndim == 0:
        return float(value)
    return value


def check_coefficients(spec: PotentialSpec) -> None:
    """Check the family-specific coefficient constraints for bound states.

    Args:
        spec: Potential family and coefficients

    Raises:
        UnboundSystemError: b <= 0
        FallToCenterError: c < 0 for Kratzer or Mie
    """
    if not spec.b > 0.0:
        raise UnboundSystemError(
            f"The {spec.family.value} potential needs b > 0 for bound states, "
            f"got b={spec.b!r}."
        )
    if spec.c < 0.0:
        raise FallToCenterError(
            f"Attractive inverse-square coupling c={spec.c!r} is excluded."
        )


def regular_j0(state: QuantumState) -> float:
    """Return J0 after checking the regularity bound J0 > 0.

    Args:
        state: Quantum state

    Returns:
        J0

    Raises:
        RegularityError: J0 <= 0
    """
    j0 = state.j0
    if not j0 > 0.0:
        raise RegularityError(
            f"flux exceeds regularity bound: J0={j0!r} for l={state.l}, "
            f"flux={state.flux!r}"
        )
    return j0


def _sigma_squared(spec: PotentialSpec, scale: PhysicalScale, j0: float) -> float:
    sigma2 = scale.coupling * spec.c + j0 * j0
    if sigma2 < 0.0:
        raise FallToCenterError(f"sigma^2={sigma2!r} < 0")
    return sigma2


def _oscillator_omega(spec: PotentialSpec, scale: PhysicalScale) -> float:
    """omega = sqrt(2Mb / hbar^2), the inverse squared oscillator length."""
    return math.sqrt(scale.coupling * spec.b)


def regularity_index(
    spec: PotentialSpec, state: QuantumState, scale: PhysicalScale
) -> float:
    """Exponent sigma with u(r) ~ r^(sigma + 1/2) near the origin.

    Args:
        spec: Potential family and coefficients
        state: Quantum state
        scale: Physical constants

    Returns:
        sigma for the Coulomb-like families, J0 for the oscillator
    """
    j0 = regular_j0(state)
    if spec.family is Family.OSCILLATOR:
        return j0
    return math.sqrt(_sigma_squared(spec, scale, j0))


def _coefficients(
    spec: PotentialSpec, j0: float, scale: PhysicalScale, binding: float
) -> NuInput:
    """Standard-form coefficients at binding energy E - a.

    Args:
        spec: Potential family and coefficients
        j0: Regular J0
        scale: Physical constants
        binding: Energy measured from the constant offset a

    Returns:
        The NU coefficients
    """
    delta = scale.coupling * binding
    if spec.family is Family.OSCILLATOR:
        omega = _oscillator_omega(spec, scale)
        return NuInput(1.0, 0.0, 0.0, 0.25, delta / (4.0 * omega), j0 * j0 / 4.0)
    return NuInput(
        1.0,
        0.0,
        0.0,
        -delta,
        scale.coupling * spec.b,
        _sigma_squared(spec, scale, j0),
    )


def effective_radial_coefficients(
    spec: PotentialSpec, state: QuantumState, scale: PhysicalScale, energy: float
) -> NuInput:
    """Map the flux-shifted radial equation onto the NU standard form.

    The oscillator is mapped in the variable s = omega r^2, the other families
    in r.

    Args:
        spec: Potential family and coefficients
        state: Quantum state
        scale: Physical constants
        energy: Trial energy

    Returns:
        The NU coefficients
    """
    check_coefficients(spec)
    j0 = regular_j0(state)
    return _coefficients(spec, j0, scale, energy - spec.a)


def _binding_energy(
    spec: PotentialSpec, state: QuantumState, scale: PhysicalScale
) -> float:
    """Closed-form energy measured from the constant offset a."""
    check_coefficients(spec)
    j0 = regular_j0(state)
    if spec.family is Family.OSCILLATOR:
        quantum = 2 * state.n + 1 + j0
        return scale.hbar * math.sqrt(2.0 * spec.b / scale.mass) * quantum

    principal = state.n + 0.5 + math.sqrt(_sigma_squared(spec, scale, j0))
    return -scale.mass * spec.b**2 / (2.0 * scale.hbar**2 * principal**2)


def closed_form_energy(
    spec: PotentialSpec, state: QuantumState, scale: PhysicalScale
) -> EnergyLevel:
    """Closed-form bound-state energy.

    Args:
        spec: Potential family and coefficients
        state: Quantum state
        scale: Physical constants

    Returns:
        The energy level with source closed_form
    """
    return EnergyLevel(
        state=state, energy=spec.a + _binding_energy(spec, state, scale)
    )


def closed_form_wavefunction(
    spec: PotentialSpec, state: QuantumState, scale: PhysicalScale
) -> RadialWavefunction:
    """Assemble the radial wavefunction from the NU solution at the closed-form energy.

    Args:
        spec: Potential family and coefficients
        state: Quantum state
        scale: Physical constants

    Returns:
        The un-normalized radial wavefunction
    """
    binding = _binding_energy(spec, state, scale)
    nu_input = _coefficients(spec, regular_j0(state), scale, binding)
    form = wavefunction_form(derive_parameters(nu_input), state.n)
    if spec.family is Family.OSCILLATOR:
        variable, omega = Variable.S_EQUALS_OMEGA_R_SQUARED, _oscillator_omega(
            spec, scale
        )
    else:
        variable, omega = Variable.R, 1.0
    return RadialWavefunction(
        spec=spec,
        state=state,
        variable=variable,
        form=form,
        energy=spec.a + binding,
        omega=omega,
    )


def normalize(wf: RadialWavefunction, r_max: float, samples: int) -> RadialWavefunction:
    """Normalize so that the integral of R^2 r^2 over [0, r_max] is one.

    Args:
        wf: Radial wavefunction
        r_max: Upper integration limit
        samples: Number of uniform samples, at least 1001

    Returns:
        The same wavefunction with norm_constant set

    Raises:
        DomainError: Too few samples or a non-positive r_max
        TailNotConvergedError: The density at r_max is not negligible
    """
    if samples < MIN_NORMALIZATION_SAMPLES:
        raise DomainError(
            f"Normalization needs at least {MIN_NORMALIZATION_SAMPLES} samples, "
            f"got {samples}."
        )
    if not r_max > 0.0:
        raise DomainError(f"r_max must be positive, got {r_max!r}.")

    r = np.linspace(0.0, r_max, samples)
    density = np.asarray(replace(wf, norm_constant=None).reduced(r)) ** 2
    peak = float(density.max())
    if not density[-1] <= TAIL_TOLERANCE * peak:
        raise TailNotConvergedError(
            f"tail not converged: density at r_max={r_max!r} is "
            f"{density[-1] / peak:.3g} of its peak; increase r_max"
        )
    integral = integrate_samples(density, step=float(r[1] - r[0]))
    return replace(wf, norm_constant=1.0 / math.sqrt(integral))


def _skip_status(error: DomainError) -> str:
    if isinstance(error, RegularityError):
        return SKIPPED_REGULARITY
    return SKIPPED_UNBOUND


def energy_row(
    spec: PotentialSpec, state: QuantumState, scale: PhysicalScale
) -> SpectrumRow:
    """Closed-form energy as a table row, skipped when out of domain.

    Args:
        spec: Potential family and coefficients
        state: Quantum state
        scale: Physical constants

    Returns:
        A table row carrying the energy or a skip status
    """
    try:
        level = closed_form_energy(spec, state, scale)
    except DomainError as error:
        return SpectrumRow(
            n=state.n,
            l=state.l,
            flux=state.flux,
            energy=None,
            status=_skip_status(error),
        )
    return SpectrumRow(n=state.n, l=state.l, flux=state.flux, energy=level.energy)


def spectrum(
    spec: PotentialSpec,
    n_max: int,
    l_max: int,
    flux: float,
    scale: PhysicalScale,
) -> SpectrumTable:
    """Tabulate closed-form energies for n <= n_max and l <= l_max.

    Args:
        spec: Potential family and coefficients
        n_max: Largest radial quantum number
        l_max: Largest orbital quantum number
        flux: Dimensionless flux
        scale: Physical constants

    Returns:
        Rows sorted by (l, n)
    """
    rows = [
        energy_row(spec, QuantumState(n=n, l=l, flux=flux), scale)
        for l in range(l_max + 1)  # noqa: E741
        for n in range(n_max + 1)
    ]
    return SpectrumTable(rows=rows)


def _expand_bracket(
    residual: Callable[[float], float], near: float, step: float
) -> Tuple[float, float]:
    """Walk away from a threshold until the residual changes sign.

    Args:
        residual: Residual as a function of energy
        near: Energy just inside the threshold
        step: Initial signed step away from the threshold

    Returns:
        A bracket ordered (lo, hi)

    Raises:
        DomainError: No sign change within the expansion limit
    """
    sign = np.sign(residual(near))
    far = near + step
    for _ in range(200):
        if np.sign(residual(far)) != sign:
            return (min(near, far), max(near, far))
        step *= 2.0
        far = near + step
    raise DomainError("No energy bracket found for the NU root.")


def nu_energy(
    spec: PotentialSpec, state: QuantumState, scale: PhysicalScale
) -> EnergyLevel:
    """Energy from a root search on the generic NU energy condition.

    The bracket comes from the threshold and the family's natural energy
    unit, not from the closed form.

    Args:
        spec: Potential family and coefficients
        state: Quantum state
        scale: Physical constants

    Returns:
        The energy level with source nu_root
    """
    check_coefficients(spec)
    j0 = regular_j0(state)

    def mapper(energy: float) -> NuInput:
        return _coefficients(spec, j0, scale, energy - spec.a)

    def residual(energy: float) -> float:
        return energy_residual_reduced(mapper(energy), state.n)

    if spec.family is Family.OSCILLATOR:
        unit = scale.hbar * math.sqrt(2.0 * spec.b / scale.mass)
        bracket = _expand_bracket(residual, spec.a, unit)
    else:
        unit = scale.mass * spec.b**2 / scale.hbar**2
        bracket = _expand_bracket(residual, spec.a - 1e-12 * unit, -unit)

    energy = solve_energy(mapper, state.n, bracket)
    return EnergyLevel(state=state, energy=energy, source=Source.NU_ROOT)

