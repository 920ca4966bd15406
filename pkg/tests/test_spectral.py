"""
Tests for the finite-element forms and the smallest Rayleigh quotient.
"""

import math

import numpy as np
import pytest
from scipy import linalg

from src.exceptions import DomainError, GaugeMismatch, NoConvergence
from src.logic import spectral
from src.logic.spectral import (
    DiscreteForm,
    EigenResult,
    assemble,
    assemble_coefficients,
    estimate_leray_constant,
    estimate_remainder_constant,
    estimate_remainder_ladder,
    graded_grid,
    leray_form,
    min_rayleigh,
    profile_vector,
    rayleigh_quotient,
    remainder_form,
    sturm_count,
    tridiagonal_matvec,
    truncation_study,
)
from src.logic.transforms import gauge_b, identity
from src.logic.weights import potential_from_name
from src.schemas.types import RatioVariant

# First zero of J0 squared: the first Dirichlet eigenvalue of the unit disk.
DISK_EIGENVALUE: float = 5.783185962946784


def _dense(diag: np.ndarray, off: np.ndarray) -> np.ndarray:
    return np.diag(diag) + np.diag(off, 1) + np.diag(off, -1)


class TestTridiagonal:
    """Test the tridiagonal helpers."""

    def test_matvec(self) -> None:
        """Test the product against a dense matrix."""
        # Given
        rng = np.random.default_rng(0)
        diag, off, x = rng.normal(size=20), rng.normal(size=19), rng.normal(size=20)

        # Then
        np.testing.assert_allclose(tridiagonal_matvec(diag, off, x), _dense(diag, off) @ x)

    @pytest.mark.parametrize("seed", range(5))
    def test_sturm_count(self, seed: int) -> None:
        """Test the count of negative eigenvalues against a dense solver."""
        # Given
        rng = np.random.default_rng(seed)
        diag, off = rng.normal(size=40), rng.normal(size=39)

        # When
        count = sturm_count(diag, off)

        # Then
        assert count == int(np.sum(np.linalg.eigvalsh(_dense(diag, off)) < 0.0))


class TestAssembly:
    """Test assembly of P1 forms."""

    def test_graded_grid(self) -> None:
        """Test the node count and the nested refinement."""
        coarse = graded_grid(16, 100.0, 1e-6)
        fine = graded_grid(32, 100.0, 1e-6)
        assert coarse.size == 18 and coarse[0] == 0.0
        assert coarse[-1] == pytest.approx(100.0)
        np.testing.assert_allclose(fine[1::2], coarse[1:], rtol=1e-13)

    def test_mass_of_constant(self) -> None:
        """Test that 1^T B 1 integrates the mass weight."""
        # Given
        grid = np.linspace(0.0, 2.0, 41)

        # When
        form = assemble_coefficients(grid, lambda t: np.ones_like(t), lambda t: t, (False, False))
        ones = np.ones(grid.size)

        # Then
        assert ones @ tridiagonal_matvec(form.b_diag, form.b_off, ones) == pytest.approx(2.0)
        assert form.N == grid.size

    def test_rejects_unsorted_grid(self) -> None:
        """Test that the grid must be strictly increasing."""
        with pytest.raises(DomainError, match="strictly increasing"):
            assemble_coefficients(np.array([0.0, 1.0, 1.0]), np.ones_like, np.ones_like)

    def test_form_shapes_are_checked(self) -> None:
        """Test the size checks of a discrete form."""
        with pytest.raises(DomainError):
            DiscreteForm(
                grid=np.linspace(0.0, 1.0, 4),
                a_diag=np.ones(4),
                a_off=np.ones(2),
                b_diag=np.ones(4),
                b_off=np.ones(3),
            )

    def test_gauge_must_match(self) -> None:
        """Test that the form is only assembled in a diagonalizing gauge."""
        with pytest.raises(GaugeMismatch):
            assemble(0.75, potential_from_name("leray"), gauge_b(0.0), 64)

    def test_minimum_size(self) -> None:
        """Test N >= 16."""
        with pytest.raises(DomainError, match="at least 16"):
            assemble(0.0, potential_from_name("leray"), gauge_b(0.0), 8)


class TestMinRayleigh:
    """Test the smallest generalized eigenvalue."""

    def test_against_dense_solver(self) -> None:
        """Test a smooth variable-coefficient problem against scipy."""
        # Given
        form = assemble_coefficients(
            np.linspace(0.0, 1.0, 81), lambda t: 1.0 + t, lambda t: 1.0 + t**2
        )
        A, B = _dense(*form.A), _dense(*form.B)

        # When
        result = min_rayleigh(form)

        # Then
        expected = linalg.eigh(A, B, eigvals_only=True)[0]
        assert result.value == pytest.approx(expected, rel=1e-9)
        assert result.converged
        assert rayleigh_quotient(form, result.vector) == pytest.approx(result.value, rel=1e-12)
        assert result.vector.sum() > 0.0

    def test_unit_disk(self) -> None:
        """Test the first radial Dirichlet eigenvalue of the unit disk."""
        # Given
        form = assemble(0.0, potential_from_name("const:1"), identity(0.0), 1024)

        # When
        result = min_rayleigh(form)

        # Then
        assert result.value == pytest.approx(DISK_EIGENVALUE, rel=1e-5)
        assert result.value > DISK_EIGENVALUE

    def test_negative_spectrum(self) -> None:
        """Test that a negative lowest eigenvalue is bracketed."""
        form = assemble_coefficients(
            np.linspace(0.0, 1.0, 65), lambda t: np.ones_like(t), lambda t: np.ones_like(t)
        ).scaled(1.0, 1.0)
        shifted = DiscreteForm(
            grid=form.grid,
            a_diag=form.a_diag - 50.0 * form.b_diag,
            a_off=form.a_off - 50.0 * form.b_off,
            b_diag=form.b_diag,
            b_off=form.b_off,
        )
        assert min_rayleigh(shifted).value == pytest.approx(
            min_rayleigh(form).value - 50.0, rel=1e-9
        )

    def test_profile_vector(self) -> None:
        """Test sampling at the unknowns and the quotient of the sine profile."""
        # Given
        form = assemble_coefficients(
            np.linspace(0.0, 1.0, 257), lambda t: np.ones_like(t), lambda t: np.ones_like(t)
        )

        # When
        v = profile_vector(form, lambda t: np.sin(math.pi * t))

        # Then
        assert v.size == form.N == 255
        assert rayleigh_quotient(form, v) == pytest.approx(math.pi**2, rel=1e-4)


class TestLerayConstant:
    """Test the discrete Leray constant along refinement ladders."""

    def test_short_ladder(self) -> None:
        """Test values above 1/4 that do not increase under refinement."""
        # When
        report = estimate_leray_constant((256, 512, 1024), truncation=False)

        # Then
        values = [row.value for row in report.rows]
        assert report.nonincreasing
        assert all(0.25 < v < 0.27 for v in values)
        assert report.truncation_value is None
        assert report.converged

    @pytest.mark.slow
    def test_full_ladder_with_truncation(self) -> None:
        """Test the default ladder and that a farther Dirichlet end lowers the value."""
        # When
        report = estimate_leray_constant()

        # Then
        assert [row.N for row in report.rows] == [256, 512, 1024, 2048, 4096]
        assert report.nonincreasing
        assert report.truncation_value < report.rows[-1].value
        assert report.truncation_value > 0.25

    @pytest.mark.parametrize("ladder", [(), (512, 256), (8, 64)])
    def test_bad_ladders(self, ladder: tuple[int, ...]) -> None:
        """Test that ladders must be increasing and start at 16 or more."""
        with pytest.raises(DomainError, match="N_ladder"):
            estimate_leray_constant(ladder)

    def test_leray_form_frame(self) -> None:
        """Test the plain log frame of the Leray form."""
        form = leray_form(64)
        assert form.grid[0] == 0.0
        assert form.dirichlet == (True, True)


class TestRemainderConstant:
    """Test the discrete remainder constants."""

    @pytest.mark.parametrize("variant", [RatioVariant.REMAINDER_L2, RatioVariant.LOG_GRADIENT])
    def test_positive(self, variant: RatioVariant) -> None:
        """Test a positive finite discrete constant."""
        value = estimate_remainder_constant(variant, N=512)
        assert math.isfinite(value) and value > 0.0

    def test_ladder(self) -> None:
        """Test that the remainder ladder does not increase."""
        report = estimate_remainder_ladder(N_ladder=(128, 256, 512), truncation=False)
        assert report.name == RatioVariant.REMAINDER_L2.value
        assert report.nonincreasing

    def test_truncation_study(self) -> None:
        """Test that moving the Dirichlet end outward does not raise the constant."""
        near, far = truncation_study(RatioVariant.REMAINDER_L2, N=512)
        assert far <= near * (1.0 + 1e-9)

    def test_unsupported_variant(self) -> None:
        """Test that only the L2 and log-gradient variants have discrete forms."""
        with pytest.raises(DomainError, match="no discrete form"):
            remainder_form(RatioVariant.ITERATED_LOG, 64)

    def test_minimum_size(self) -> None:
        """Test N >= 16."""
        with pytest.raises(DomainError):
            estimate_remainder_constant(N=8)


class TestUnconvergedEigenpairs:
    """Test how a stalled inverse iteration is reported."""

    @pytest.fixture
    def stalled(self, monkeypatch: pytest.MonkeyPatch) -> None:
        def stall(
            form: DiscreteForm, tol: float | None = None, max_iter: int | None = None
        ) -> EigenResult:
            best = EigenResult(
                value=0.3, vector=np.ones(form.N), residual=1e-3, iterations=200, converged=False
            )
            raise NoConvergence(f"inverse iteration on {form.label!r} stalled", best)

        monkeypatch.setattr(spectral, "min_rayleigh", stall)

    @pytest.mark.usefixtures("stalled")
    def test_ladder_rows_are_flagged(self) -> None:
        """Test that every step keeps its best value and is marked unconverged."""
        # When
        report = estimate_leray_constant((32, 64))

        # Then
        assert [row.value for row in report.rows] == [0.3, 0.3]
        assert not any(row.converged for row in report.rows)
        assert not report.truncation_converged
        assert not report.converged

    @pytest.mark.usefixtures("stalled")
    def test_single_constant_raises(self) -> None:
        with pytest.raises(NoConvergence, match="stalled"):
            estimate_remainder_constant(N=64)

    @pytest.mark.usefixtures("stalled")
    def test_truncation_study_raises(self) -> None:
        with pytest.raises(NoConvergence):
            truncation_study(RatioVariant.REMAINDER_L2, N=64)
