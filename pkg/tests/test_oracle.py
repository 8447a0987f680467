"""Test cases for the oracle module."""
import logging
from typing import Any

import numpy as np
import pytest
from scipy.linalg import LinAlgError

from nuspectra import (
    closed_form_energy,
    closed_form_wavefunction,
    compare_levels,
    default_config,
    DomainError,
    eigen_tridiagonal,
    energy_unit,
    LevelCountMismatchError,
    Mesh,
    OracleConfig,
    OracleResult,
    oracle_spectrum,
    PhysicalScale,
    PotentialSpec,
    QuantumState,
    run_verification,
    solve_radial,
    Source,
    spectrum,
    StagnationError,
    sturm_count,
    UnboundLevelError,
    VerificationCase,
)

NATURAL = PhysicalScale()
COULOMB = PotentialSpec.modified_coulomb(a=0.0, b=1.0)
OSCILLATOR = PotentialSpec.modified_oscillator(a=0.0, b=0.5)
KRATZER = PotentialSpec.kratzer_fues(b=1.0, c=1.0)
MIE = PotentialSpec.mie_type(a=1.0, b=1.0, c=1.0)
SPECS = [COULOMB, OSCILLATOR, KRATZER, MIE]


def dense(diag: np.ndarray, offdiag: np.ndarray) -> np.ndarray:
    """Dense symmetric matrix of a tridiagonal pair."""
    return np.diag(diag) + np.diag(offdiag, 1) + np.diag(offdiag, -1)


def test_sturm_count_matches_dense_eigenvalues() -> None:
    """It counts the eigenvalues below the shift."""
    rng = np.random.default_rng(7)
    for size in range(1, 51):
        diag = rng.normal(size=size)
        offdiag = rng.normal(size=size - 1)
        eigenvalues = np.linalg.eigvalsh(dense(diag, offdiag))
        for mu in rng.uniform(-4.0, 4.0, size=5):
            assert sturm_count(diag, offdiag, mu) == int(np.sum(eigenvalues < mu))


def test_eigen_tridiagonal_matches_dense() -> None:
    """It returns the lowest eigenpairs in ascending order."""
    rng = np.random.default_rng(11)
    diag = rng.normal(size=40)
    offdiag = rng.normal(size=39)
    matrix = dense(diag, offdiag)
    expected = np.linalg.eigvalsh(matrix)[:5]
    pairs = eigen_tridiagonal(diag, offdiag, 5)
    assert len(pairs) == 5
    np.testing.assert_allclose([value for value, _ in pairs], expected, atol=1e-10)
    for value, vector in pairs:
        assert np.linalg.norm(vector) == pytest.approx(1.0, abs=1e-12)
        np.testing.assert_allclose(matrix @ vector, value * vector, atol=1e-8)


def test_eigen_tridiagonal_laplacian() -> None:
    """It reproduces the spectrum of the three-point Laplacian."""
    for size in range(1, 51):
        pairs = eigen_tridiagonal(np.full(size, 2.0), np.full(size - 1, -1.0), size)
        expected = 2.0 - 2.0 * np.cos(np.arange(1, size + 1) * np.pi / (size + 1))
        np.testing.assert_allclose(
            [value for value, _ in pairs], expected, rtol=0.0, atol=1e-10
        )


def test_eigen_tridiagonal_degenerate() -> None:
    """It returns orthonormal vectors for a decoupled degenerate pair."""
    pairs = eigen_tridiagonal([1.0, 1.0], [0.0], 2)
    assert [value for value, _ in pairs] == pytest.approx([1.0, 1.0], abs=1e-14)
    vectors = np.array([vector for _, vector in pairs])
    np.testing.assert_allclose(vectors @ vectors.T, np.eye(2), atol=1e-12)


def test_eigen_tridiagonal_single() -> None:
    """It solves a 1x1 matrix."""
    pairs = eigen_tridiagonal([3.5], [], 1)
    assert pairs[0][0] == 3.5
    np.testing.assert_array_equal(pairs[0][1], [1.0])


def test_eigen_tridiagonal_invalid() -> None:
    """Should raise domain error for bad sizes or level counts."""
    with pytest.raises(DomainError):
        eigen_tridiagonal([1.0, 2.0], [0.5, 0.5], 1)
    with pytest.raises(DomainError):
        eigen_tridiagonal([1.0, 2.0], [0.5], 3)
    with pytest.raises(DomainError):
        eigen_tridiagonal([1.0, 2.0], [0.5], 0)


def test_eigen_tridiagonal_stagnation(mocker: Any) -> None:
    """Should raise stagnation error when LAPACK fails."""
    mocker.patch(
        "nuspectra.oracle.eigh_tridiagonal", side_effect=LinAlgError("no convergence")
    )
    with pytest.raises(StagnationError):
        eigen_tridiagonal([1.0, 2.0, 3.0], [0.5, 0.5], 1)


def test_oracle_config_validation() -> None:
    """Should raise domain error for unusable grids."""
    with pytest.raises(DomainError):
        OracleConfig(r_max=10.0, points=50)
    with pytest.raises(DomainError):
        OracleConfig(r_max=10.0, r_min=20.0)
    with pytest.raises(DomainError):
        OracleConfig(r_max=-1.0)
    with pytest.raises(DomainError):
        OracleConfig(r_max=10.0, levels_requested=0)
    assert OracleConfig(r_max=40.0, points=4000).inner == 0.01
    assert OracleConfig(r_max=2.0, mesh=Mesh.LOGARITHMIC).inner == 2e-20
    assert OracleConfig(r_max=2.0, mesh=Mesh.LOGARITHMIC).knee == 0.05


def test_default_config() -> None:
    """It picks the mesh from the near-origin exponent."""
    config = default_config(COULOMB, l=0, flux=0.0, n_max=2, scale=NATURAL)
    assert config.mesh is Mesh.LINEAR
    assert config.r_max == pytest.approx(108.0, rel=1e-12)
    assert config.levels_requested == 3
    assert config.points == 8000
    assert default_config(COULOMB, 0, 0.3, 2, NATURAL).mesh is Mesh.LOGARITHMIC
    assert default_config(KRATZER, 0, 0.3, 2, NATURAL).mesh is Mesh.LINEAR
    assert default_config(OSCILLATOR, 0, 0.0, 0, NATURAL).r_max == 8.0


def test_default_config_scales_points_with_energy_unit() -> None:
    """It refines the grid as the natural energy unit grows."""
    assert energy_unit(COULOMB, NATURAL) == 1.0
    assert energy_unit(OSCILLATOR, NATURAL) == 1.0
    strong = PotentialSpec.modified_coulomb(a=0.0, b=3.0)
    assert energy_unit(strong, NATURAL) == 9.0
    config = default_config(strong, 0, 0.0, 2, NATURAL)
    assert config.points == 24000
    assert config.r_max == pytest.approx(36.0, rel=1e-12)
    weak = PotentialSpec.modified_coulomb(a=0.0, b=0.5)
    assert default_config(weak, 0, 0.0, 2, NATURAL).points == 8000
    heavy = PhysicalScale(hbar=2.0, mass=0.5)
    assert default_config(OSCILLATOR, 0, 0.3, 2, heavy).points == 13455


def test_default_config_caps_points(caplog: Any) -> None:
    """It caps the point count and warns for a very strong coupling."""
    strong = PotentialSpec.modified_coulomb(a=0.0, b=100.0)
    with caplog.at_level(logging.WARNING):
        config = default_config(strong, 0, 0.0, 0, NATURAL)
    assert config.points == 200_000
    assert "oracle may be coarse" in caplog.text


def test_coulomb_ground_state() -> None:
    """It reproduces the hydrogen ground state within 1e-4."""
    config = default_config(COULOMB, 0, 0.0, 0, NATURAL)
    result = solve_radial(COULOMB, 0, 0.0, NATURAL, config)
    assert isinstance(result, OracleResult)
    assert result.eigenvalues[0] == pytest.approx(-0.5, abs=1e-4)
    assert result.eigenvectors.shape == (1, config.points)
    norm = np.sum(result.eigenvectors[0] ** 2 * result.weights)
    assert norm == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize(
    "spec,r_max,points", [(COULOMB, 40.0, 2000), (OSCILLATOR, 8.0, 400)]
)
def test_second_order_convergence(
    spec: PotentialSpec, r_max: float, points: int
) -> None:
    """It quarters the ground-state error when the step is halved."""
    exact = closed_form_energy(spec, QuantumState(n=0, l=0), NATURAL).energy
    errors = []
    for count in (points, 2 * points):
        config = OracleConfig(r_max=r_max, points=count)
        result = solve_radial(spec, 0, 0.0, NATURAL, config)
        errors.append(abs(result.eigenvalues[0] - exact))
    assert 3.5 < errors[0] / errors[1] < 4.5


def test_logarithmic_mesh_small_j0() -> None:
    """It resolves J0 = 0.2 states on the logarithmic mesh."""
    config = default_config(COULOMB, 0, 0.3, 2, NATURAL)
    result = solve_radial(COULOMB, 0, 0.3, NATURAL, config)
    for n in range(3):
        exact = closed_form_energy(COULOMB, QuantumState(n=n, l=0, flux=0.3), NATURAL)
        assert result.eigenvalues[n] == pytest.approx(exact.energy, abs=1e-4)
    norm = np.sum(result.eigenvectors[0] ** 2 * result.weights)
    assert norm == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("spec", SPECS)
def test_eigenvectors_overlap_closed_form(spec: PotentialSpec) -> None:
    """It returns eigenvectors matching the closed-form wavefunctions."""
    for l in range(3):  # noqa: E741
        for flux in (0.0, 0.3):
            config = default_config(spec, l, flux, 2, NATURAL)
            result = solve_radial(spec, l, flux, NATURAL, config)
            for n in range(3):
                state = QuantumState(n=n, l=l, flux=flux)
                closed = np.asarray(
                    closed_form_wavefunction(spec, state, NATURAL).reduced(result.grid)
                )
                numeric = result.eigenvectors[n]
                overlap = abs(np.sum(numeric * closed * result.weights)) / np.sqrt(
                    np.sum(numeric**2 * result.weights)
                    * np.sum(closed**2 * result.weights)
                )
                assert overlap > 0.999


def test_oracle_flux_periodicity() -> None:
    """It gives the same levels for (l + 1, flux + 1) and (l, flux)."""
    config = default_config(COULOMB, 0, 0.2, 2, NATURAL)
    raised = solve_radial(COULOMB, 1, 1.2, NATURAL, config)
    base = solve_radial(COULOMB, 0, 0.2, NATURAL, config)
    np.testing.assert_allclose(raised.eigenvalues, base.eigenvalues, atol=1e-8)


def test_unbound_level() -> None:
    """Should raise unbound level error for box states above V(r_max)."""
    config = OracleConfig(r_max=5.0, points=1000, levels_requested=3)
    with pytest.raises(UnboundLevelError):
        solve_radial(COULOMB, 0, 0.0, NATURAL, config)


def test_compare_levels_tolerance() -> None:
    """It passes at 1e-4 and fails at 1e-9."""
    config = default_config(COULOMB, 0, 0.0, 1, NATURAL)
    numeric = solve_radial(COULOMB, 0, 0.0, NATURAL, config)
    closed = spectrum(COULOMB, 1, 0, 0.0, NATURAL)
    report = compare_levels(closed, numeric, abs_tol=1e-4)
    assert report.passed
    assert [level.n for level in report.levels] == [0, 1]
    assert report.worst_deviation < 1e-4
    assert report.mesh is Mesh.LINEAR
    assert report.points == 8000
    strict = compare_levels(closed, numeric, abs_tol=1e-9)
    assert not strict.passed


def test_compare_levels_empty(caplog: Any) -> None:
    """It returns a vacuous pass and logs a warning for an empty table."""
    config = default_config(COULOMB, 1, 0.0, 0, NATURAL)
    numeric = solve_radial(COULOMB, 1, 0.0, NATURAL, config)
    closed = spectrum(COULOMB, 0, 0, 0.6, NATURAL)
    with caplog.at_level(logging.WARNING):
        report = compare_levels(closed, numeric, abs_tol=1e-4)
    assert report.passed
    assert report.levels == []
    assert "Nothing to compare" in caplog.text


def test_compare_levels_count_mismatch() -> None:
    """Should raise level count mismatch error for a short oracle result."""
    config = default_config(COULOMB, 0, 0.0, 0, NATURAL)
    numeric = solve_radial(COULOMB, 0, 0.0, NATURAL, config)
    closed = spectrum(COULOMB, 2, 0, 0.0, NATURAL)
    with pytest.raises(LevelCountMismatchError):
        compare_levels(closed, numeric, abs_tol=1e-4)


def test_run_verification_default_grid() -> None:
    """It passes every family on the default state grid."""
    cases = [
        VerificationCase(spec=spec, l=l, flux=flux, n_max=2)
        for spec in SPECS
        for l in range(3)  # noqa: E741
        for flux in (0.0, 0.3)
    ]
    reports = run_verification(cases, workers=4)
    assert [(report.family, report.l, report.flux) for report in reports] == [
        (case.spec.family, case.l, case.flux) for case in cases
    ]
    for report in reports:
        assert report.passed, report
        assert len(report.levels) == 3
        assert report.worst_deviation < 1e-4


def test_run_verification_reports_errors() -> None:
    """It reports an oracle failure as a failed case."""
    case = VerificationCase(spec=COULOMB, l=0, flux=0.0, n_max=2, r_max=5.0)
    (report,) = run_verification([case])
    assert not report.passed
    assert "V(r_max)" in report.error


def test_run_verification_coarse_grid() -> None:
    """It fails on a coarse grid at the default tolerance."""
    case = VerificationCase(spec=COULOMB, l=0, flux=0.0, n_max=2, points=200)
    (report,) = run_verification([case])
    assert not report.passed


def test_run_verification_invalid_workers() -> None:
    """Should raise domain error for fewer than one worker."""
    with pytest.raises(DomainError):
        run_verification([], workers=0)


@pytest.mark.parametrize(
    "spec,flux", [(COULOMB, 0.0), (COULOMB, 0.3), (OSCILLATOR, 0.3), (MIE, 0.0)]
)
def test_eigenvector_sign_changes(spec: PotentialSpec, flux: float) -> None:
    """It returns eigenvector k with exactly k interior sign changes."""
    config = default_config(spec, 0, flux, 4, NATURAL)
    result = solve_radial(spec, 0, flux, NATURAL, config)
    for k, vector in enumerate(result.eigenvectors):
        significant = vector[np.abs(vector) > 1e-8 * np.max(np.abs(vector))]
        assert np.count_nonzero(np.diff(np.sign(significant))) == k


def test_logarithmic_mesh_layout() -> None:
    """It spans r_min to r_max, with a fine ln r spacing near the origin."""
    config = default_config(OSCILLATOR, 0, 0.3, 2, NATURAL)
    result = solve_radial(OSCILLATOR, 0, 0.3, NATURAL, config)
    grid = result.grid
    assert grid[0] == pytest.approx(config.inner, rel=1e-9)
    assert grid[-1] == pytest.approx(config.r_max, rel=1e-12)
    assert np.all(np.diff(grid) > 0.0)
    spacing = np.diff(grid)
    assert spacing[-1] == pytest.approx(spacing[-2], rel=1e-6)
    assert spacing[-1] < 10.0 * config.r_max / config.points
    assert spacing[0] < 1e-18


@pytest.mark.parametrize(
    "spec,scale",
    [
        (PotentialSpec.modified_coulomb(a=0.0, b=3.0), NATURAL),
        (PotentialSpec.modified_coulomb(a=0.0, b=2.0), NATURAL),
        (OSCILLATOR, PhysicalScale(hbar=2.0, mass=0.5)),
        (PotentialSpec.modified_oscillator(a=0.0, b=2.0), NATURAL),
    ],
)
def test_run_verification_scaled_couplings(
    spec: PotentialSpec, scale: PhysicalScale
) -> None:
    """It passes the default tolerance away from unit couplings and masses."""
    cases = [
        VerificationCase(spec=spec, l=l, flux=flux, n_max=2, scale=scale)
        for l in range(2)  # noqa: E741
        for flux in (0.0, 0.3)
    ]
    for report in run_verification(cases, workers=2):
        assert report.passed, report
        assert len(report.levels) == 3


def test_oracle_spectrum() -> None:
    """It tabulates the oracle levels with source oracle."""
    config = default_config(COULOMB, 1, 0.3, 1, NATURAL)
    numeric = solve_radial(COULOMB, 1, 0.3, NATURAL, config)
    table = oracle_spectrum(numeric, 1, 0.3)
    assert [row.n for row in table.rows] == [0, 1]
    assert {row.source for row in table.rows} == {Source.ORACLE}
    assert {(row.l, row.flux) for row in table.rows} == {(1, 0.3)}
    assert [row.energy for row in table.rows] == numeric.eigenvalues.tolist()
    assert table.to_records()[0]["source"] is Source.ORACLE
