"""Exceptions module for the nuspectra package."""


class NuSpectraError(Exception):
    """Base exception class for nuspectra."""

    pass


class DomainError(NuSpectraError):
    """Exception class for inputs outside the domain of an operation."""

    pass


class ConfigError(NuSpectraError):
    """Exception class for unusable configuration values."""

    pass


class ComplexBranchError(DomainError):
    """Exception class for negative radicands in the NU parameters."""

    pass


class RegularityError(DomainError):
    """Exception class for flux values that leave J0 <= 0."""

    pass


class UnboundSystemError(DomainError):
    """Exception class for potential coefficients admitting no bound state."""

    pass


class FallToCenterError(DomainError):
    """Exception class for attractive inverse-square couplings."""

    pass


class NormalizationError(NuSpectraError):
    """Exception class for normalization errors."""

    pass


class NonNormalizableError(NormalizationError):
    """Exception class for wavefunction forms without exponential decay."""

    pass


class TailNotConvergedError(NormalizationError):
    """Exception class for radial grids that cut off a non-negligible tail."""

    pass


class RootFindingError(NuSpectraError):
    """Exception class for root finding errors."""

    pass


class NoSignChangeError(RootFindingError):
    """Exception class for brackets that do not straddle a root."""

    pass


class NoConvergenceError(RootFindingError):
    """Exception class for root searches exceeding the iteration limit."""

    pass


class OracleError(NuSpectraError):
    """Exception class for finite-difference oracle errors."""

    pass


class UnboundLevelError(OracleError):
    """Exception class for requested levels above the continuum threshold."""

    pass


class StagnationError(OracleError):
    """Exception class for eigensolver failures on the tridiagonal matrix."""

    pass


class LevelCountMismatchError(OracleError):
    """Exception class for oracle results shorter than the compared table."""

    pass
