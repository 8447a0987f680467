"""Oracle module for the finite-difference cross-check of closed-form spectra.

The reduced radial equation

    -(hbar^2 / 2M) u'' + [V(r) + hbar^2 lambda0 / (2M r^2)] u = E u

is discretized on a bounded interval with Dirichlet walls. The lowest
eigenpairs of the resulting symmetric tridiagonal matrix come from Sturm
bisection and inverse iteration.

When u vanishes like r^(sigma + 1/2) with sigma < 1 the uniform mesh converges
slower than h^2, so those states are solved on a mapped mesh that is uniform
in ln r near the origin and uniform in r beyond a knee radius.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
import logging
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import eigh_tridiagonal, LinAlgError
from scipy.special import expit

from .exceptions import (
    DomainError,
    LevelCountMismatchError,
    NuSpectraError,
    StagnationError,
    UnboundLevelError,
)
from .family import Family
from .potentials import (
    check_coefficients,
    PhysicalScale,
    potential_value,
    PotentialSpec,
    QuantumState,
    regular_j0,
    regularity_index,
    spectrum,
)
from .source import Source
from .table import SpectrumRow, SpectrumTable

logger = logging.getLogger(__name__)

DEFAULT_POINTS = 8000
MIN_POINTS = 100
COULOMB_EXTENT = 12.0
OSCILLATOR_EXTENT = 8.0
LOG_MESH_INNER = 1e-20
LOG_MESH_KNEE = 40.0
MAX_POINTS = 200_000
RESIDUAL_TOLERANCE = 1e-8
EIGENVALUE_TOLERANCE = 1e-12


class Mesh(str, Enum):
    """Discretization mesh enum."""

    LINEAR = "linear"
    LOGARITHMIC = "logarithmic"


@dataclass(frozen=True)
class OracleConfig:
    """Grid extent and resolution of one oracle solve."""

    r_max: float
    points: int = DEFAULT_POINTS
    levels_requested: int = 1
    r_min: Optional[float] = None
    mesh: Mesh = Mesh.LINEAR

    def __post_init__(self) -> None:
        """Validate the grid.

        Raises:
            DomainError: Invalid extent, resolution or level count
        """
        if self.points < MIN_POINTS:
            raise DomainError(
                f"At least {MIN_POINTS} points needed, got {self.points}."
            )
        if not self.r_max > 0.0:
            raise DomainError(f"r_max must be positive, got {self.r_max!r}.")
        if self.levels_requested < 1:
            raise DomainError(
                f"At least one level must be requested, got {self.levels_requested}."
            )
        if not 0.0 < self.inner < self.r_max:
            raise DomainError(
                f"Need 0 < r_min < r_max, got r_min={self.inner!r}, "
                f"r_max={self.r_max!r}."
            )

    @property
    def inner(self) -> float:
        """float, the innermost grid node."""
        if self.r_min is not None:
            return self.r_min
        if Mesh(self.mesh) is Mesh.LOGARITHMIC:
            return LOG_MESH_INNER * self.r_max
        return self.r_max / self.points

    @property
    def knee(self) -> float:
        """float, the radius where the logarithmic mesh turns uniform."""
        return self.r_max / LOG_MESH_KNEE


@dataclass(frozen=True)
class OracleResult:
    """Lowest eigenpairs of the discretized radial operator.

    ``eigenvectors`` holds u(r) sampled on ``grid``, one level per row,
    normalized so that ``sum(u**2 * weights) == 1`` and positive near the
    origin.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    grid: np.ndarray
    weights: np.ndarray
    config: OracleConfig


@dataclass(frozen=True)
class LevelComparison:
    """Closed-form and oracle energy of one level."""

    n: int
    l: int  # noqa: E741
    flux: float
    closed_form: float
    oracle: float
    deviation: float
    passed: bool


@dataclass(frozen=True)
class ComparisonReport:
    """Outcome of comparing a closed-form table against an oracle solve."""

    levels: List[LevelComparison] = field(default_factory=list)
    mesh: Mesh = Mesh.LINEAR
    points: int = 0
    r_min: float = 0.0
    r_max: float = 0.0
    family: Optional[Family] = None
    l: int = 0  # noqa: E741
    flux: float = 0.0
    error: str = ""

    @property
    def passed(self) -> bool:
        """bool, true when no level failed and no error occurred."""
        return not self.error and all(level.passed for level in self.levels)

    @property
    def worst_deviation(self) -> float:
        """float, the largest absolute deviation, 0 for an empty report."""
        return max((level.deviation for level in self.levels), default=0.0)


@dataclass(frozen=True)
class VerificationCase:
    """One (family, l, flux) slice to verify."""

    spec: PotentialSpec
    l: int  # noqa: E741
    flux: float
    n_max: int
    scale: PhysicalScale = field(default_factory=PhysicalScale)
    r_min: Optional[float] = None
    r_max: Optional[float] = None
    points: Optional[int] = None
    levels: Optional[int] = None
    abs_tol: float = 1e-4
    rel_tol: float = 0.0


def sturm_count(diag: Sequence[float], offdiag: Sequence[float], mu: float) -> int:
    """Count the eigenvalues of a symmetric tridiagonal matrix below mu.

    Args:
        diag: Main diagonal
        offdiag: Off-diagonal, one shorter than diag
        mu: Shift

    Returns:
        Number of negative pivots of T - mu I
    """
    d = np.asarray(diag, dtype=float)
    e = np.asarray(offdiag, dtype=float)
    pivmin = np.finfo(float).tiny * max(1.0, float(np.max(e**2, initial=0.0)))
    count = 0
    previous = 1.0
    for i in range(d.size):
        pivot = d[i] - mu
        if i > 0:
            pivot -= e[i - 1] ** 2 / previous
        if abs(pivot) < pivmin:
            pivot = -pivmin
        if pivot < 0.0:
            count += 1
        previous = pivot
    return count


def _gershgorin_width(d: np.ndarray, e: np.ndarray) -> float:
    radius = np.zeros_like(d)
    radius[:-1] += np.abs(e)
    radius[1:] += np.abs(e)
    return float(np.max(d + radius) - np.min(d - radius))


def eigen_tridiagonal(
    diag: Sequence[float],
    offdiag: Sequence[float],
    k: int,
    tol: Optional[float] = None,
) -> List[Tuple[float, np.ndarray]]:
    """Lowest k eigenpairs of a symmetric tridiagonal matrix.

    Eigenvalues come from Sturm-sequence bisection and eigenvectors from
    inverse iteration (LAPACK stebz and stein).

    Args:
        diag: Main diagonal
        offdiag: Off-diagonal, one shorter than diag
        k: Number of pairs, 1 <= k <= len(diag)
        tol: Absolute eigenvalue tolerance, relative to the Gershgorin width
            by default

    Returns:
        Pairs (eigenvalue, unit eigenvector) in ascending order

    Raises:
        DomainError: Inconsistent sizes or k out of range
        StagnationError: Inverse iteration did not reach a small residual
    """
    d = np.asarray(diag, dtype=float)
    e = np.asarray(offdiag, dtype=float)
    if e.size != d.size - 1:
        raise DomainError(f"Off-diagonal size {e.size} does not match {d.size}.")
    if not 1 <= k <= d.size:
        raise DomainError(f"Requested {k} eigenpairs of a {d.size}x{d.size} matrix.")
    if d.size == 1:
        return [(float(d[0]), np.ones(1))]

    width = _gershgorin_width(d, e)
    if tol is None:
        tol = EIGENVALUE_TOLERANCE * width
    try:
        values, vectors = eigh_tridiagonal(
            d,
            e,
            select="i",
            select_range=(0, k - 1),
            lapack_driver="stebz",
            tol=tol,
        )
    except (LinAlgError, ValueError) as error:
        raise StagnationError(f"inverse iteration failed: {error}") from error

    bound = RESIDUAL_TOLERANCE * max(1.0, float(np.max(np.abs(d))))
    pairs = []
    for value, vector in zip(values, vectors.T):
        product = d * vector
        product[:-1] += e * vector[1:]
        product[1:] += e * vector[:-1]
        residual = float(np.max(np.abs(product - value * vector)))
        if not residual < bound:
            raise StagnationError(
                f"inverse iteration stagnated: residual {residual:.3g} for "
                f"eigenvalue {value!r}"
            )
        pairs.append((float(value), vector))
    return pairs


def _softplus_inverse(y: float) -> float:
    """The x with ln(1 + e^x) == y, for y > 0."""
    return y + math.log(-math.expm1(-y))


def energy_unit(spec: PotentialSpec, scale: PhysicalScale) -> float:
    """Natural energy unit of a family.

    M b^2 / hbar^2 for the Coulomb-like families, hbar sqrt(2b / M) for the
    oscillator. Both are 1 for the reference couplings in natural units.

    Args:
        spec: Potential family and coefficients
        scale: Physical constants

    Returns:
        The unit, positive for a confining coupling
    """
    if spec.family is Family.OSCILLATOR:
        return scale.hbar * math.sqrt(2.0 * spec.b / scale.mass)
    return scale.mass * spec.b**2 / scale.hbar**2


def _orient(u: np.ndarray) -> np.ndarray:
    """Flip the sign so that the first significant sample is positive."""
    significant = np.flatnonzero(np.abs(u) > 1e-6 * np.max(np.abs(u)))
    if significant.size and u[significant[0]] < 0.0:
        return -u
    return u


def default_config(
    spec: PotentialSpec,
    l: int,  # noqa: E741
    flux: float,
    n_max: int,
    scale: PhysicalScale,
) -> OracleConfig:
    """Grid that holds the levels n <= n_max of one (l, flux) slice.

    Args:
        spec: Potential family and coefficients
        l: Orbital quantum number
        flux: Dimensionless flux
        n_max: Largest radial quantum number to resolve
        scale: Physical constants

    Returns:
        The oracle configuration
    """
    check_coefficients(spec)
    sigma = regularity_index(spec, QuantumState(n=0, l=l, flux=flux), scale)
    if spec.family is Family.OSCILLATOR:
        omega = math.sqrt(scale.coupling * spec.b)
        r_max = OSCILLATOR_EXTENT / math.sqrt(omega)
    else:
        principal = n_max + 0.5 + sigma
        r_max = COULOMB_EXTENT * scale.hbar**2 * principal**2 / (scale.mass * spec.b)

    # r_max is fixed in the natural length, so the discretization error
    # scales with the energy unit and with h^2.
    unit = energy_unit(spec, scale)
    needed = math.ceil(DEFAULT_POINTS * math.sqrt(max(1.0, unit)))
    points = min(MAX_POINTS, needed)
    if needed > MAX_POINTS:
        logger.warning(
            "Energy unit %g needs more than %d points; the oracle may be coarse.",
            unit,
            MAX_POINTS,
        )

    mesh = Mesh.LINEAR if sigma >= 1.0 or sigma == 0.5 else Mesh.LOGARITHMIC
    return OracleConfig(
        r_max=r_max, points=points, levels_requested=n_max + 1, mesh=mesh
    )


def solve_radial(
    spec: PotentialSpec,
    l: int,  # noqa: E741
    flux: float,
    scale: PhysicalScale,
    config: OracleConfig,
) -> OracleResult:
    """Lowest eigenpairs of the discretized flux-shifted radial equation.

    Args:
        spec: Potential family and coefficients
        l: Orbital quantum number
        flux: Dimensionless flux
        scale: Physical constants
        config: Grid configuration

    Returns:
        Eigenvalues with sampled reduced eigenfunctions

    Raises:
        UnboundLevelError: A requested level lies above the potential at r_max
    """
    state = QuantumState(n=0, l=l, flux=flux)
    check_coefficients(spec)
    j0 = regular_j0(state)
    kinetic = scale.kinetic
    points = config.points

    if Mesh(config.mesh) is Mesh.LINEAR:
        r = np.linspace(config.inner, config.r_max, points)
        h = r[1] - r[0]
        diag = 2.0 * kinetic / h**2 + potential_value(spec, r)
        diag = diag + kinetic * state.lambda0 / r**2
        offdiag = np.full(points - 1, -kinetic / h**2)
        weights = np.full(points, h)
        scaling = 1.0 / np.sqrt(weights)
    else:
        # r = knee * ln(1 + e^x), solved for U = u / sqrt(r) in the
        # self-adjoint form -(p U')' + q U = E w U with p = r / r', w = r r'.
        knee = config.knee
        x = np.linspace(
            _softplus_inverse(config.inner / knee),
            _softplus_inverse(config.r_max / knee),
            points,
        )
        h = x[1] - x[0]
        r = knee * np.logaddexp(0.0, x)
        dr = knee * expit(x)
        middle = x[0] - 0.5 * h + h * np.arange(points + 1)
        p = np.logaddexp(0.0, middle) / expit(middle)
        w = r * dr
        stiffness = kinetic * (p[:-1] + p[1:]) / h**2
        local = kinetic * j0 * j0 / r + potential_value(spec, r) * r
        diag = (stiffness + dr * local) / w
        offdiag = -kinetic * p[1:-1] / (h**2 * np.sqrt(w[:-1] * w[1:]))
        weights = dr * h
        scaling = 1.0 / np.sqrt(weights)

    tol = EIGENVALUE_TOLERANCE * max(1.0, float(np.min(np.abs(diag))))
    pairs = eigen_tridiagonal(diag, offdiag, config.levels_requested, tol=tol)

    threshold = float(potential_value(spec, config.r_max))
    for index, (value, _) in enumerate(pairs):
        if not value < threshold:
            raise UnboundLevelError(
                f"level {index} at {value!r} is not below V(r_max)={threshold!r}; "
                "it is a box state"
            )

    logger.debug(
        "Solved %s l=%d flux=%r on %s mesh: %d points, r in [%g, %g]",
        spec.family.value,
        l,
        flux,
        Mesh(config.mesh).value,
        points,
        config.inner,
        config.r_max,
    )
    return OracleResult(
        eigenvalues=np.array([value for value, _ in pairs]),
        eigenvectors=np.array([_orient(vector * scaling) for _, vector in pairs]),
        grid=r,
        weights=weights,
        config=config,
    )


def oracle_spectrum(
    numeric: OracleResult,
    l: int,  # noqa: E741
    flux: float,
) -> SpectrumTable:
    """Tabulate the oracle eigenvalues of one (l, flux) slice.

    Args:
        numeric: Oracle eigenpairs
        l: Orbital quantum number of the solve
        flux: Dimensionless flux of the solve

    Returns:
        One row per level, n counting from 0, with source oracle
    """
    return SpectrumTable(
        rows=[
            SpectrumRow(n=n, l=l, flux=flux, energy=float(value), source=Source.ORACLE)
            for n, value in enumerate(numeric.eigenvalues)
        ]
    )


def compare_levels(
    closed: SpectrumTable,
    numeric: OracleResult,
    abs_tol: float,
    rel_tol: float = 0.0,
) -> ComparisonReport:
    """Compare a closed-form (l, flux) slice level by level with the oracle.

    A level passes when its deviation is within abs_tol + rel_tol * |E|.

    Args:
        closed: Closed-form rows of one (l, flux) slice
        numeric: Oracle eigenvalues of the same slice
        abs_tol: Absolute tolerance
        rel_tol: Relative tolerance

    Returns:
        The per-level report

    Raises:
        LevelCountMismatchError: The oracle returned fewer levels than rows
    """
    config = numeric.config
    report = ComparisonReport(
        mesh=Mesh(config.mesh),
        points=config.points,
        r_min=config.inner,
        r_max=config.r_max,
    )
    rows = sorted(closed.bound_rows(), key=lambda row: row.n)
    if not rows:
        logger.warning("Nothing to compare: the closed-form table has no bound rows.")
        return report

    needed = rows[-1].n + 1
    if numeric.eigenvalues.size < needed:
        raise LevelCountMismatchError(
            f"oracle returned {numeric.eigenvalues.size} levels, table needs {needed}"
        )

    tabulated = oracle_spectrum(numeric, rows[0].l, rows[0].flux).rows
    levels = []
    for row in rows:
        energy = float(row.energy)  # type: ignore[arg-type]
        oracle = float(tabulated[row.n].energy)  # type: ignore[arg-type]
        deviation = abs(oracle - energy)
        levels.append(
            LevelComparison(
                n=row.n,
                l=row.l,
                flux=row.flux,
                closed_form=energy,
                oracle=oracle,
                deviation=deviation,
                passed=deviation <= abs_tol + rel_tol * abs(energy),
            )
        )
    return replace(report, levels=levels)


def verify_case(case: VerificationCase) -> ComparisonReport:
    """Solve one slice with both methods and compare.

    Errors are reported as a failed comparison.

    Args:
        case: The slice to verify

    Returns:
        The comparison report
    """
    family = case.spec.family
    try:
        config = default_config(case.spec, case.l, case.flux, case.n_max, case.scale)
        overrides = {
            name: value
            for name, value in (
                ("r_min", case.r_min),
                ("r_max", case.r_max),
                ("points", case.points),
                ("levels_requested", case.levels),
            )
            if value is not None
        }
        config = replace(config, **overrides)
        closed = spectrum(case.spec, case.n_max, case.l, case.flux, case.scale)
        numeric = solve_radial(case.spec, case.l, case.flux, case.scale, config)
        report = compare_levels(
            closed.slice(case.l, case.flux), numeric, case.abs_tol, case.rel_tol
        )
    except NuSpectraError as error:
        logger.error(
            "Verification of %s l=%d flux=%r failed: %s",
            family.value,
            case.l,
            case.flux,
            error,
        )
        return ComparisonReport(
            family=family, l=case.l, flux=case.flux, error=str(error)
        )

    if not report.passed:
        logger.warning(
            "%s l=%d flux=%r deviates by %.3g",
            family.value,
            case.l,
            case.flux,
            report.worst_deviation,
        )
    return replace(report, family=family, l=case.l, flux=case.flux)


def run_verification(
    cases: Sequence[VerificationCase], workers: int = 1
) -> List[ComparisonReport]:
    """Verify slices, optionally on a thread pool.

    Args:
        cases: Slices to verify
        workers: Number of worker threads

    Returns:
        One report per case, in case order

    Raises:
        DomainError: workers < 1
    """
    if workers < 1:
        raise DomainError(f"At least one worker needed, got {workers}.")
    if workers == 1:
        return [verify_case(case) for case in cases]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(verify_case, cases))
