"""nuspectra package."""
try:
    from importlib.metadata import version, PackageNotFoundError  # type: ignore
except ImportError:  # pragma: no cover
    from importlib_metadata import version, PackageNotFoundError  # type: ignore

try:
    __version__ = version(__name__)
except PackageNotFoundError:  # pragma: no cover
    __version__ = "unknown"

from .exceptions import (
    ComplexBranchError,
    ConfigError,
    DomainError,
    FallToCenterError,
    LevelCountMismatchError,
    NoConvergenceError,
    NonNormalizableError,
    NormalizationError,
    NoSignChangeError,
    NuSpectraError,
    OracleError,
    RegularityError,
    RootFindingError,
    StagnationError,
    TailNotConvergedError,
    UnboundLevelError,
    UnboundSystemError,
)
from .family import Family
from .nu_core import (
    derive_parameters,
    energy_residual_general,
    energy_residual_reduced,
    NuDerived,
    NuInput,
    solve_energy,
    wavefunction_form,
    WavefunctionForm,
)
from .oracle import (
    compare_levels,
    ComparisonReport,
    default_config,
    eigen_tridiagonal,
    energy_unit,
    Mesh,
    OracleConfig,
    OracleResult,
    oracle_spectrum,
    run_verification,
    solve_radial,
    sturm_count,
    VerificationCase,
)
from .potentials import (
    closed_form_energy,
    closed_form_wavefunction,
    effective_potential,
    effective_radial_coefficients,
    EnergyLevel,
    normalize,
    nu_energy,
    PhysicalScale,
    potential_value,
    PotentialSpec,
    QuantumState,
    RadialWavefunction,
    spectrum,
    Variable,
)
from .source import Source
from .special_functions import (
    generalized_binomial,
    integrate_samples,
    jacobi,
    laguerre,
    laguerre_at_origin,
)
from .table import SpectrumRow, SpectrumTable
