"""Command-line module for spectra, wavefunctions, flux sweeps and verification.

Exit codes: 0 on success, 1 on a domain or verification failure and 2 on a
usage or configuration error.

Defaults come from flags first, then from the ``key = value`` file named by
the NU_SPECTRA_CONFIG environment variable, then from built-in values.
"""
import argparse
from contextlib import contextmanager
from dataclasses import dataclass, field
import logging
import os
from pathlib import Path
import sys
from typing import (
    Any,
    Callable,
    Dict,
    IO,
    Iterator,
    List,
    Mapping,
    Optional,
    Sequence,
    Set,
    Tuple,
)

from dotenv import dotenv_values
import numpy as np

from .exceptions import (
    ConfigError,
    DomainError,
    NuSpectraError,
    TailNotConvergedError,
)
from .family import Family
from .oracle import run_verification, VerificationCase
from .potentials import (
    closed_form_wavefunction,
    energy_row,
    normalize,
    PhysicalScale,
    PotentialSpec,
    QuantumState,
    spectrum,
)
from .table import Record, SPECTRUM_HEADER, SpectrumTable, write_records

logger = logging.getLogger(__name__)

CONFIG_ENV = "NU_SPECTRA_CONFIG"
WAVEFUNCTION_HEADER = ("r", "R")
VERIFY_HEADER = (
    "family",
    "n",
    "l",
    "flux",
    "closed_form",
    "oracle",
    "deviation",
    "passed",
    "mesh",
    "points",
    "r_min",
    "r_max",
)
VERIFY_FLUXES = (0.0, 0.3)
DEFAULT_WAVEFUNCTION_RMAX = 40.0

REFERENCE_SPECS = {
    Family.COULOMB: PotentialSpec.modified_coulomb(a=0.0, b=1.0),
    Family.OSCILLATOR: PotentialSpec.modified_oscillator(a=0.0, b=0.5),
    Family.KRATZER: PotentialSpec.kratzer_fues(b=1.0, c=1.0),
    Family.MIE: PotentialSpec.mie_type(a=1.0, b=1.0, c=1.0),
}


def _non_negative_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid integer {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be non-negative, got {value}")
    return value


def _positive_int(text: str) -> int:
    value = _non_negative_int(text)
    if value == 0:
        raise argparse.ArgumentTypeError("must be positive, got 0")
    return value


def _real(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid number {text!r}") from None


def _choice(choices: Sequence[str]) -> Callable[[str], str]:
    def convert(text: str) -> str:
        if text not in choices:
            raise argparse.ArgumentTypeError(
                f"invalid choice {text!r}, choose from {', '.join(choices)}"
            )
        return text

    return convert


FAMILIES = tuple(family.value for family in Family)
FORMATS = ("csv", "json")

# Settings that may come from a flag or the defaults file, with converters.
OPTIONS: Dict[str, Callable[[str], Any]] = {
    "potential": _choice(FAMILIES),
    "family": _choice(FAMILIES),
    "a": _real,
    "b": _real,
    "c": _real,
    "hbar": _real,
    "mass": _real,
    "charge": _real,
    "flux": _real,
    "phi_ab": _real,
    "flux_start": _real,
    "flux_stop": _real,
    "flux_steps": _non_negative_int,
    "n": _non_negative_int,
    "l": _non_negative_int,
    "nmax": _non_negative_int,
    "lmax": _non_negative_int,
    "format": _choice(FORMATS),
    "out": Path,
    "rmin": _real,
    "rmax": _real,
    "points": _positive_int,
    "levels": _positive_int,
    "samples": _positive_int,
    "abs_tol": _real,
    "rel_tol": _real,
    "workers": _positive_int,
}

DEFAULTS: Dict[str, Any] = {
    "potential": Family.COULOMB.value,
    "a": 0.0,
    "b": 1.0,
    "c": 0.0,
    "hbar": 1.0,
    "mass": 1.0,
    "charge": 1.0,
    "n": 0,
    "l": 0,
    "nmax": 2,
    "lmax": 2,
    "format": "csv",
    "samples": 2001,
    "abs_tol": 1e-4,
    "rel_tol": 0.0,
    "workers": 1,
}


@dataclass(frozen=True)
class RunConfig:
    """Resolved settings of one command-line run."""

    potential: PotentialSpec
    scale: PhysicalScale = field(default_factory=PhysicalScale)
    n_max: int = 2
    l_max: int = 2
    n: int = 0
    l: int = 0  # noqa: E741
    flux: Optional[float] = None
    sweep: Optional[Tuple[float, float, int]] = None
    output_format: str = "csv"
    out: Optional[Path] = None
    r_min: Optional[float] = None
    r_max: Optional[float] = None
    points: Optional[int] = None
    levels: Optional[int] = None
    samples: int = 2001
    abs_tol: float = 1e-4
    rel_tol: float = 0.0
    family: Optional[Family] = None
    workers: int = 1
    coefficient_overrides: Dict[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        """Validate the sweep range and output format.

        Raises:
            DomainError: Fewer than 2 sweep steps or an unknown format
        """
        if self.sweep is not None and self.sweep[2] < 2:
            raise DomainError(
                f"A flux sweep needs at least 2 steps, got {self.sweep[2]}."
            )
        if self.output_format not in FORMATS:
            raise DomainError(f"Unknown output format {self.output_format!r}.")

    @property
    def flux_value(self) -> float:
        """float, the flux with 0 when unset."""
        return 0.0 if self.flux is None else self.flux


def load_file_defaults(path: Optional[str]) -> Dict[str, str]:
    """Read the key-value defaults file.

    Args:
        path: File path, or None when no file is configured

    Returns:
        Values of the known keys

    Raises:
        ConfigError: The file does not exist
    """
    if not path:
        return {}
    if not Path(path).is_file():
        raise ConfigError(f"{CONFIG_ENV} names a missing file: {path}")

    values: Dict[str, str] = {}
    for key, value in dotenv_values(path).items():
        name = key.strip().replace("-", "_")
        if name not in OPTIONS:
            logger.warning("Ignoring unknown key %r in %s", key, path)
            continue
        if value is not None:
            values[name] = value
    return values


def resolve_settings(
    args: argparse.Namespace, file_values: Mapping[str, str]
) -> Dict[str, Any]:
    """Merge flags, file values and built-in defaults.

    Args:
        args: Parsed command line, unset options are None
        file_values: Raw values from the defaults file

    Returns:
        Setting per option name, None when nothing supplied one. The key
        "supplied" holds the names set by a flag or the file.

    Raises:
        ConfigError: A file value cannot be converted
    """
    settings: Dict[str, Any] = {}
    supplied: Set[str] = set()
    for name, convert in OPTIONS.items():
        value = getattr(args, name, None)
        if value is None and name in file_values:
            try:
                value = convert(file_values[name])
            except (argparse.ArgumentTypeError, ValueError) as error:
                raise ConfigError(f"bad value for {name!r}: {error}") from error
        if value is None:
            value = DEFAULTS.get(name)
        else:
            supplied.add(name)
        settings[name] = value
    settings["supplied"] = frozenset(supplied)
    return settings


def build_run_config(settings: Mapping[str, Any]) -> RunConfig:
    """Turn resolved settings into a RunConfig.

    Args:
        settings: Output of resolve_settings

    Returns:
        The run configuration

    Raises:
        ConfigError: Inconsistent or out-of-domain settings
    """
    try:
        scale = PhysicalScale(
            hbar=settings["hbar"], mass=settings["mass"], charge=settings["charge"]
        )
        family = Family(settings["potential"])
        potential = _potential(family, settings["a"], settings["b"], settings["c"])

        flux = settings["flux"]
        if settings["phi_ab"] is not None:
            if flux is not None:
                raise ConfigError("--flux and --phi-ab are mutually exclusive")
            flux = scale.flux_fraction(settings["phi_ab"])

        sweep = None
        bounds = (settings["flux_start"], settings["flux_stop"], settings["flux_steps"])
        if any(value is not None for value in bounds):
            if any(value is None for value in bounds):
                raise ConfigError(
                    "a sweep needs --flux-start, --flux-stop and --flux-steps"
                )
            sweep = (float(bounds[0]), float(bounds[1]), int(bounds[2]))

        overrides = {
            name: float(settings[name])
            for name in ("a", "b", "c")
            if name in settings["supplied"]
        }
        return RunConfig(
            potential=potential,
            scale=scale,
            n_max=settings["nmax"],
            l_max=settings["lmax"],
            n=settings["n"],
            l=settings["l"],
            flux=flux,
            sweep=sweep,
            output_format=settings["format"],
            out=settings["out"],
            r_min=settings["rmin"],
            r_max=settings["rmax"],
            points=settings["points"],
            levels=settings["levels"],
            samples=settings["samples"],
            abs_tol=settings["abs_tol"],
            rel_tol=settings["rel_tol"],
            family=None if settings["family"] is None else Family(settings["family"]),
            workers=settings["workers"],
            coefficient_overrides=overrides,
        )
    except DomainError as error:
        raise ConfigError(str(error)) from error


def _potential(family: Family, a: float, b: float, c: float) -> PotentialSpec:
    if family is Family.COULOMB:
        return PotentialSpec.modified_coulomb(a=a, b=b)
    if family is Family.OSCILLATOR:
        return PotentialSpec.modified_oscillator(a=a, b=b)
    if family is Family.KRATZER:
        return PotentialSpec.kratzer_fues(b=b, c=c)
    return PotentialSpec.mie_type(a=a, b=b, c=c)


@contextmanager
def _output(config: RunConfig) -> Iterator[IO[str]]:
    if config.out is None:
        yield sys.stdout
        return
    with open(config.out, "w", encoding="utf-8", newline="") as stream:
        yield stream


def _emit(records: Sequence[Record], header: Sequence[str], config: RunConfig) -> None:
    with _output(config) as stream:
        write_records(records, header, config.output_format, stream)


def cmd_spectrum(config: RunConfig) -> int:
    """Tabulate closed-form energies.

    Args:
        config: Run configuration

    Returns:
        Exit status, 1 when every row was skipped
    """
    table = spectrum(
        config.potential, config.n_max, config.l_max, config.flux_value, config.scale
    )
    _emit(table.to_records(), SPECTRUM_HEADER, config)
    if table.all_skipped:
        logger.error("No bound state in the requested range: %s", table.rows[0].status)
        return 1
    return 0


def cmd_wavefunction(config: RunConfig) -> int:
    """Sample a normalized radial wavefunction.

    Args:
        config: Run configuration

    Returns:
        Exit status
    """
    state = QuantumState(n=config.n, l=config.l, flux=config.flux_value)
    r_max = DEFAULT_WAVEFUNCTION_RMAX if config.r_max is None else config.r_max
    wf = closed_form_wavefunction(config.potential, state, config.scale)
    try:
        wf = normalize(wf, r_max, config.samples)
    except TailNotConvergedError as error:
        logger.error("%s (try a larger --rmax)", error)
        return 1

    r = np.linspace(0.0, r_max, config.samples)
    if state.l0 < 0.0:
        r = r[1:]
    values = np.asarray(wf.radial(r))
    records = [
        {"r": float(radius), "R": float(value)} for radius, value in zip(r, values)
    ]
    _emit(records, WAVEFUNCTION_HEADER, config)
    return 0


def cmd_flux_sweep(config: RunConfig) -> int:
    """Energy of one (n, l) state across a flux range.

    Args:
        config: Run configuration

    Returns:
        Exit status, 1 when every flux was skipped

    Raises:
        DomainError: No sweep range configured
    """
    if config.sweep is None:
        raise DomainError("flux-sweep needs --flux-start, --flux-stop and --flux-steps")
    start, stop, steps = config.sweep
    table = SpectrumTable(
        rows=[
            energy_row(
                config.potential,
                QuantumState(n=config.n, l=config.l, flux=float(flux)),
                config.scale,
            )
            for flux in np.linspace(start, stop, steps)
        ]
    )
    _emit(table.to_records(), SPECTRUM_HEADER, config)
    if table.all_skipped:
        logger.error("Every flux in the sweep violates the regularity bound.")
        return 1
    return 0


def _reference_spec(family: Family, overrides: Mapping[str, float]) -> PotentialSpec:
    reference = REFERENCE_SPECS[family]
    a = overrides.get("a", reference.a)
    b = overrides.get("b", reference.b)
    c = overrides.get("c", reference.c)
    if family is Family.KRATZER:
        a = 0.0
    if family in (Family.COULOMB, Family.OSCILLATOR):
        c = 0.0
    return _potential(family, a, b, c)


def verification_cases(config: RunConfig) -> List[VerificationCase]:
    """The (family, l, flux) slices of a verify run.

    Args:
        config: Run configuration

    Returns:
        Cases ordered by family, l and flux
    """
    families = list(Family) if config.family is None else [config.family]
    fluxes = VERIFY_FLUXES if config.flux is None else (config.flux,)
    return [
        VerificationCase(
            spec=_reference_spec(family, config.coefficient_overrides),
            l=l,
            flux=flux,
            n_max=config.n_max,
            scale=config.scale,
            r_min=config.r_min,
            r_max=config.r_max,
            points=config.points,
            levels=config.levels,
            abs_tol=config.abs_tol,
            rel_tol=config.rel_tol,
        )
        for family in families
        for l in range(config.l_max + 1)  # noqa: E741
        for flux in fluxes
    ]


def cmd_verify(config: RunConfig) -> int:
    """Compare closed-form energies with the finite-difference oracle.

    Args:
        config: Run configuration

    Returns:
        Exit status, 0 only when every case passed
    """
    reports = run_verification(verification_cases(config), config.workers)
    records: List[Record] = []
    for report in reports:
        grid = {
            "mesh": report.mesh,
            "points": report.points,
            "r_min": report.r_min,
            "r_max": report.r_max,
        }
        if report.error:
            records.append(
                {
                    "family": report.family,
                    "l": report.l,
                    "flux": report.flux,
                    "passed": False,
                }
            )
            continue
        for level in report.levels:
            records.append(
                {
                    "family": report.family,
                    "n": level.n,
                    "l": level.l,
                    "flux": level.flux,
                    "closed_form": level.closed_form,
                    "oracle": level.oracle,
                    "deviation": level.deviation,
                    "passed": level.passed,
                    **grid,
                }
            )
            if not level.passed:
                logger.warning(
                    "FAIL %s n=%d l=%d flux=%r: deviation %.3g on %s mesh with "
                    "%d points, r in [%g, %g]",
                    report.family.value if report.family else "",
                    level.n,
                    level.l,
                    level.flux,
                    level.deviation,
                    report.mesh.value,
                    report.points,
                    report.r_min,
                    report.r_max,
                )
    _emit(records, VERIFY_HEADER, config)

    passed = sum(report.passed for report in reports)
    worst = max((report.worst_deviation for report in reports), default=0.0)
    logger.info(
        "%d of %d cases passed, worst deviation %.3g", passed, len(reports), worst
    )
    return 0 if passed == len(reports) else 1


def _add_common_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--potential", type=OPTIONS["potential"], help=", ".join(FAMILIES)
    )
    parser.add_argument("--a", type=_real, help="constant offset a")
    parser.add_argument("--b", type=_real, help="coupling b")
    parser.add_argument("--c", type=_real, help="inverse-square coupling c")
    parser.add_argument("--hbar", type=_real, help="reduced Planck constant")
    parser.add_argument("--mass", type=_real, help="particle mass")
    parser.add_argument("--charge", type=_real, help="charge entering the flux quantum")
    parser.add_argument("--flux", type=_real, help="dimensionless flux")
    parser.add_argument(
        "--phi-ab", dest="phi_ab", type=_real, help="magnetic flux, converted to flux"
    )
    parser.add_argument("--n", type=_non_negative_int, help="radial quantum number")
    parser.add_argument("--l", type=_non_negative_int, help="orbital quantum number")
    parser.add_argument("--nmax", type=_non_negative_int, help="largest n")
    parser.add_argument("--lmax", type=_non_negative_int, help="largest l")
    parser.add_argument("--format", type=OPTIONS["format"], help="csv or json")
    parser.add_argument("--out", type=Path, help="output file, stdout by default")


def _add_grid_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--rmin", type=_real, help="innermost grid node")
    parser.add_argument("--rmax", type=_real, help="outer radius")
    parser.add_argument("--points", type=_positive_int, help="grid points")
    parser.add_argument("--levels", type=_positive_int, help="levels to solve")


def build_parser() -> argparse.ArgumentParser:
    """Build the argument parser.

    Returns:
        The parser with one subcommand per operation
    """
    parser = argparse.ArgumentParser(
        prog="nuspectra",
        description="Bound states under Aharonov-Bohm flux for solvable potentials.",
    )
    parser.add_argument(
        "-v", "--verbose", action="store_true", help="log at DEBUG level"
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    spectrum_parser = subparsers.add_parser("spectrum", help="tabulate energies")
    _add_common_arguments(spectrum_parser)
    spectrum_parser.set_defaults(handler=cmd_spectrum)

    wavefunction_parser = subparsers.add_parser(
        "wavefunction", help="sample a normalized radial wavefunction"
    )
    _add_common_arguments(wavefunction_parser)
    wavefunction_parser.add_argument("--rmax", type=_real, help="outer radius")
    wavefunction_parser.add_argument(
        "--samples", type=_positive_int, help="number of samples, at least 1001"
    )
    wavefunction_parser.set_defaults(handler=cmd_wavefunction)

    sweep_parser = subparsers.add_parser("flux-sweep", help="energy against flux")
    _add_common_arguments(sweep_parser)
    sweep_parser.add_argument("--flux-start", dest="flux_start", type=_real)
    sweep_parser.add_argument("--flux-stop", dest="flux_stop", type=_real)
    sweep_parser.add_argument("--flux-steps", dest="flux_steps", type=_non_negative_int)
    sweep_parser.set_defaults(handler=cmd_flux_sweep)

    verify_parser = subparsers.add_parser(
        "verify", help="compare closed forms with the finite-difference oracle"
    )
    _add_common_arguments(verify_parser)
    _add_grid_arguments(verify_parser)
    verify_parser.add_argument("--family", type=OPTIONS["family"], help="one family")
    verify_parser.add_argument("--abs-tol", dest="abs_tol", type=_real)
    verify_parser.add_argument("--rel-tol", dest="rel_tol", type=_real)
    verify_parser.add_argument("--workers", type=_positive_int, help="worker threads")
    verify_parser.set_defaults(handler=cmd_verify)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run the command line.

    Args:
        argv: Arguments without the program name, sys.argv by default

    Returns:
        Exit status
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )

    try:
        file_values = load_file_defaults(os.environ.get(CONFIG_ENV))
        config = build_run_config(resolve_settings(args, file_values))
    except ConfigError as error:
        parser.error(str(error))

    try:
        return int(args.handler(config))
    except NuSpectraError as error:
        logger.error("%s", error)
        return 1
