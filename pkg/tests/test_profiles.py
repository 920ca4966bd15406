"""
Tests for the explicit trial families.
"""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate as sp_integrate

from src.exceptions import DomainError
from src.logic.profiles import (
    SMOOTHSTEP_SQUARE_INTEGRAL,
    bisect_panels,
    concentrating_family,
    cutoff_eta,
    h0_profile,
    moser_family,
    plateau_family,
    random_profile,
    smoothstep,
    smoothstep_antiderivative,
    smoothstep_derivative,
    wkappa_constants,
    wkappa_family,
    zeta_t1,
)
from src.logic.transforms import constants_for, gauge_c
from src.schemas.profile import RadialProfile
from src.schemas.types import FamilyName, Frame, GaugeTag, PlateauRamp, Smoothness


def _assert_derivative_matches(profile: RadialProfile, t: np.ndarray, rtol: float = 1e-6) -> None:
    h = 1e-6 * np.maximum(1.0, np.abs(t))
    numeric = (np.asarray(profile(t + h)) - np.asarray(profile(t - h))) / (2.0 * h)
    np.testing.assert_allclose(profile.derivative(t), numeric, rtol=rtol, atol=1e-8)


class TestSmoothstep:
    """Test the quintic transition."""

    def test_values(self) -> None:
        """Test clamping and the midpoint value."""
        np.testing.assert_array_equal(smoothstep(np.array([-1.0, 0.0, 1.0, 2.0])), [0, 0, 1, 1])
        assert smoothstep(0.5) == pytest.approx(0.5, rel=1e-15)

    def test_square_integral(self) -> None:
        """Test int_0^1 smoothstep^2 = 181/462."""
        value, _ = sp_integrate.quad(lambda x: float(smoothstep(x)) ** 2, 0.0, 1.0)
        assert value == pytest.approx(SMOOTHSTEP_SQUARE_INTEGRAL, rel=1e-12)

    @given(x=st.floats(min_value=-0.5, max_value=1.5))
    def test_antiderivative(self, x: float) -> None:
        """Test the closed-form antiderivative against quadrature split at the joints."""
        edges = [-0.5, *(p for p in (0.0, 1.0) if -0.5 < p < x), x]
        value = sum(
            sp_integrate.quad(lambda y: float(smoothstep(y)), a, b)[0]
            for a, b in zip(edges[:-1], edges[1:])
        )
        assert float(smoothstep_antiderivative(x)) == pytest.approx(value, abs=1e-10)

    def test_derivative_vanishes_at_joints(self) -> None:
        """Test that the transition is C^1 at 0 and 1."""
        np.testing.assert_array_equal(smoothstep_derivative(np.array([0.0, 1.0])), [0.0, 0.0])
        assert smoothstep_derivative(0.5) == pytest.approx(1.875)


class TestZeta:
    """Test the one-dimensional minimizers with a fixed value at t1."""

    @pytest.mark.parametrize("t1, tau0", [(3.0, 0.0), (10.0, -0.5), (100.0, 0.25)])
    def test_shape(self, t1: float, tau0: float) -> None:
        """Test zeta(2) = 0 and the plateau value (t1^e - 2^e)^(1/2)."""
        # Given
        zeta = zeta_t1(t1, tau0)
        exponent = 1.0 - 2.0 * tau0

        # Then
        assert zeta(2.0) == 0.0
        assert zeta.plateau == (t1, pytest.approx(math.sqrt(t1**exponent - 2.0**exponent)))
        assert zeta(2.0 * t1) == pytest.approx(zeta.plateau[1], rel=1e-14)
        assert zeta.gauge.tag is GaugeTag.GAUGE_A
        assert zeta.gauge.tau0 == tau0

    def test_derivative(self) -> None:
        """Test the closed-form derivative."""
        zeta = zeta_t1(50.0, 0.25)
        _assert_derivative_matches(zeta, np.linspace(2.5, 49.0, 30))

    @pytest.mark.parametrize("t1, tau0", [(2.0, 0.0), (1.0, 0.0), (5.0, 0.5)])
    def test_domain(self, t1: float, tau0: float) -> None:
        """Test t1 > 2 and tau0 < 1/2."""
        with pytest.raises(DomainError):
            zeta_t1(t1, tau0)


class TestMoserFamily:
    """Test the Moser family in the GaugeB frame."""

    @pytest.mark.parametrize("n, mu", [(10, 0.0), (100, 0.75), (1000, -0.1875)])
    def test_plateau_amplitude(self, n: int, mu: float) -> None:
        """Test the plateau value nu n^(1/2 - tau0) and the gauge."""
        # Given
        consts = constants_for(mu)

        # When
        w = moser_family(n, mu)

        # Then
        amplitude = consts.nu * n ** (0.5 - consts.tau0)
        assert w.plateau == (float(n), pytest.approx(amplitude, rel=1e-14))
        assert w(n) == pytest.approx(amplitude, rel=1e-14)
        assert w(0.0) == 0.0
        assert w.gauge.accepts(mu)
        assert w.family == FamilyName.MOSER.value

    def test_mu_zero_is_linear(self, moser_10: RadialProfile) -> None:
        """Test w_n(t) = t / sqrt(4 pi n) below n at mu = 0."""
        t = np.linspace(0.0, 10.0, 11)
        np.testing.assert_allclose(moser_10(t), t / math.sqrt(40.0 * math.pi), rtol=1e-14)

    def test_derivative(self) -> None:
        """Test the closed-form derivative for sigma != 1."""
        w = moser_family(40, 0.75)
        _assert_derivative_matches(w, np.linspace(0.5, 39.0, 25))

    @pytest.mark.parametrize("n, mu", [(1, 0.0), (10, -0.25), (10, -0.3)])
    def test_domain(self, n: int, mu: float) -> None:
        """Test n >= 2 and mu > -1/4."""
        with pytest.raises(DomainError):
            moser_family(n, mu)


class TestWkappa:
    """Test the cutoff and the critical-frame family built from it."""

    def test_constants(self) -> None:
        """Test b1 = kappa - 2 and the closed form of b2."""
        b1, b2 = wkappa_constants(10.0)
        assert b1 == 8.0
        assert b2 == pytest.approx(math.sqrt(4.0 * math.pi * (7.0 + 362.0 / 462.0)), rel=1e-15)

    def test_cutoff_shape(self) -> None:
        """Test eta = 0 before 1, 1 on [2, kappa - 1] and 0 from kappa."""
        eta = cutoff_eta(12.0)
        np.testing.assert_array_equal(eta(np.array([0.5, 1.0, 12.0, 13.0])), [0, 0, 0, 0])
        np.testing.assert_allclose(eta(np.linspace(2.0, 11.0, 10)), 1.0)
        assert eta.gauge.tag is GaugeTag.GAUGE_C

    def test_plateau_and_return(self) -> None:
        """Test w = b1 / b2 on [kappa, 2 kappa + 1] and w = 0 from 3 kappa."""
        # Given
        kappa = 20.0
        w = wkappa_family(kappa)
        b1, b2 = wkappa_constants(kappa)

        # Then
        np.testing.assert_allclose(w(np.linspace(kappa, 2 * kappa + 1, 15)), b1 / b2, rtol=1e-13)
        assert w(3.0 * kappa) == pytest.approx(0.0, abs=1e-13)
        assert w(0.5) == 0.0

    def test_unit_flat_norm(self) -> None:
        """Test 2 pi int w'^2 dt = 1, which fixes b2."""
        # Given
        kappa = 16.0
        w = wkappa_family(kappa)

        # When
        value, _ = sp_integrate.quad(
            lambda t: 2.0 * math.pi * float(w.derivative(t)) ** 2,
            1.0,
            3.0 * kappa,
            points=[b for b in w.breakpoints if 1.0 < b < 3.0 * kappa],
            limit=200,
        )

        # Then
        assert value == pytest.approx(1.0, rel=1e-10)

    def test_kappa_domain(self) -> None:
        """Test kappa > 4."""
        with pytest.raises(DomainError, match="kappa must exceed 4"):
            wkappa_family(4.0)


class TestPlateauFamily:
    """Test the translated plateau family."""

    @pytest.mark.parametrize(
        "ramp, energy", [(PlateauRamp.LINEAR, 1.0), (PlateauRamp.FOUR_PIECE, 1.5)]
    )
    def test_energy(self, ramp: PlateauRamp, energy: float) -> None:
        """Test 4 pi int w'^2 dt for both ramps."""
        # Given
        n = 40
        w = plateau_family(n, ramp=ramp)

        # When
        value, _ = sp_integrate.quad(
            lambda t: 4.0 * math.pi * float(w.derivative(t)) ** 2,
            0.0,
            n,
            points=[0.25 * n, 0.5 * n],
        )

        # Then
        assert value == pytest.approx(energy, rel=1e-12)

    def test_frame(self) -> None:
        """Test that t = 0 at the edge of the bump and the offset is carried."""
        # Given
        w = plateau_family(8, offset=0.5, radius=0.25)

        # Then
        assert float(w.gauge.inverse(np.asarray(0.0))) == pytest.approx(0.25, rel=1e-15)
        assert w.offset == 0.5
        assert w.plateau[1] == pytest.approx(math.sqrt(8.0 / (4.0 * math.pi)))

    @pytest.mark.parametrize(
        "n, offset, radius", [(7, 0.5, 0.25), (8, 0.2, 0.25), (8, 0.8, 0.25), (8, 0.5, 0.0)]
    )
    def test_domain(self, n: int, offset: float, radius: float) -> None:
        """Test n >= 8 and a ball avoiding the origin inside the unit disk."""
        with pytest.raises(DomainError):
            plateau_family(n, offset=offset, radius=radius)


class TestConcentratingFamily:
    """Test the unit-energy family for negative coupling constants."""

    def test_shape(self) -> None:
        """Test continuity at t = 1 and the plateau value."""
        # Given
        w = concentrating_family(50, -0.1875)
        amplitude = w.params["amplitude"]

        # Then
        assert w(1.0 - 1e-12) == pytest.approx(w(1.0), rel=1e-9)
        assert w(50.0) == pytest.approx(amplitude, rel=1e-14)
        assert w(-1.0) == 0.0

    def test_shift_enters_gauge(self) -> None:
        """Test that t_eps is the gauge shift."""
        w = concentrating_family(50, -0.1875, t_eps=3.0)
        assert w.gauge.shift == 3.0

    @pytest.mark.parametrize(
        "n, mu, t_eps", [(50, 0.0, 0.0), (50, -0.25, 0.0), (1, -0.1, 0.0), (50, -0.1, -1.0)]
    )
    def test_domain(self, n: int, mu: float, t_eps: float) -> None:
        """Test mu in (-1/4, 0), n >= 2 and t_eps >= 0."""
        with pytest.raises(DomainError):
            concentrating_family(n, mu, t_eps)


class TestH0:
    """Test the unbounded kernel-direction profile."""

    def test_values(self) -> None:
        """Test h0(1/4) = sqrt(ln 4), h0 = 0 from r = 1/2 and unbounded growth at 0."""
        # Given
        h0 = h0_profile()

        # Then
        assert h0(0.25) == pytest.approx(math.sqrt(math.log(4.0)), rel=1e-14)
        assert h0(0.5) == pytest.approx(0.0, abs=1e-15)
        assert h0(0.75) == 0.0
        assert h0(1e-200) == pytest.approx(math.sqrt(200.0 * math.log(10.0)), rel=1e-12)
        assert h0.core.exponent == 0.5
        assert h0.frame is Frame.U_FRAME

    def test_derivative(self) -> None:
        """Test the closed-form derivative across the cutoff."""
        h0 = h0_profile()
        _assert_derivative_matches(h0, np.linspace(0.01, 0.49, 40), rtol=1e-5)


class TestRandomProfile:
    """Test seeded random profiles."""

    def test_reproducible(self) -> None:
        """Test that a seed determines the profile."""
        r = np.linspace(1e-3, 0.95, 101)
        np.testing.assert_array_equal(random_profile(3)(r), random_profile(3)(r))
        assert not np.array_equal(random_profile(3)(r), random_profile(4)(r))

    @pytest.mark.parametrize("smoothness", list(Smoothness))
    def test_compact_and_nonnegative(self, smoothness: Smoothness) -> None:
        """Test support, sign and vanishing at the ends."""
        # Given
        u = random_profile(11, smoothness=smoothness, inner_radius=0.01, outer_radius=0.8)

        # Then
        assert u.support == (0.01, 0.8)
        assert u.is_compact
        assert np.all(u.values >= 0.0)
        assert u(0.01) == pytest.approx(0.0, abs=1e-15)
        assert u(0.8) == pytest.approx(0.0, abs=1e-15)
        assert u.params["seed"] == 11

    def test_knot_count(self) -> None:
        """Test that count sets the interior knots of a piecewise-linear profile."""
        u = random_profile(0, count=5)
        assert len(u.breakpoints) == 7

    def test_w_frame(self) -> None:
        """Test that a w-frame profile is pushed into the given gauge."""
        w = random_profile(2, Frame.W_FRAME, gauge=gauge_c())
        assert w.frame is Frame.W_FRAME
        assert w.gauge.tag is GaugeTag.GAUGE_C

    def test_domain(self) -> None:
        """Test ordered radii and a gauge for w-frame requests."""
        with pytest.raises(DomainError):
            random_profile(0, inner_radius=0.5, outer_radius=0.4)
        with pytest.raises(DomainError, match="needs a gauge"):
            random_profile(0, Frame.W_FRAME)

    def test_bisect_panels(self) -> None:
        """Test that bisection doubles the panels and leaves the values alone."""
        # Given
        u = random_profile(0, count=5)
        r = np.linspace(1e-3, 0.95, 257)

        # When
        v = bisect_panels(u)

        # Then
        lo, hi = v.support
        assert len([b for b in v.breakpoints if lo < b < hi]) == 11
        assert set(u.breakpoints) <= set(v.breakpoints)
        assert set(v.breakpoints) <= set(v.nodes)
        np.testing.assert_array_equal(v(r), u(r))
