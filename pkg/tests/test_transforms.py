"""
Tests for the gauge substitutions and profile transport between frames.
"""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from src.exceptions import DomainError, GaugeMismatch
from src.logic.profiles import moser_family
from src.logic.transforms import (
    MU_CRITICAL,
    GaugeTransform,
    constants_for,
    energy_identity_residual,
    gauge_a,
    gauge_b,
    gauge_c,
    gauge_for,
    gauge_from_name,
    identity,
    pull,
    push,
)
from src.schemas.profile import RadialProfile, from_samples
from src.schemas.types import Frame, GaugeTag

GAUGES = {
    "gaugeB(0)": gauge_b(0.0),
    "gaugeB(3/4)": gauge_b(0.75),
    "gaugeB(-3/16)": gauge_b(-0.1875),
    "gaugeA(1)": gauge_a(1.0, 0.0),
    "gaugeC": gauge_c(),
}


class TestConstants:
    """Test the constants attached to a coupling constant."""

    def test_zero_coupling(self) -> None:
        """Test tau0 = 0, sigma = 1, m = 4 pi, nu = (4 pi)^(-1/2) at mu = 0."""
        consts = constants_for(0.0)
        assert consts.tau0 == 0.0
        assert consts.sigma == 1.0
        assert consts.m == pytest.approx(4.0 * math.pi, rel=1e-15)
        assert consts.nu == pytest.approx((4.0 * math.pi) ** -0.5, rel=1e-14)

    def test_critical_coupling(self) -> None:
        """Test that nu is undefined at mu = -1/4."""
        consts = constants_for(MU_CRITICAL)
        assert consts.tau0 == 0.5
        assert consts.m == 0.0
        assert consts.nu is None
        assert not consts.nu_defined

    def test_intermediate_coupling(self) -> None:
        """Test tau0 = 1/4, sigma = 1/2, m = 2 pi at mu = -3/16."""
        consts = constants_for(-0.1875)
        assert consts.tau0 == pytest.approx(0.25, rel=1e-15)
        assert consts.sigma == pytest.approx(0.5, rel=1e-15)
        assert consts.m == pytest.approx(2.0 * math.pi, rel=1e-15)

    @pytest.mark.parametrize("mu", [-0.26, -1.0, math.nan])
    def test_below_critical_raises(self, mu: float) -> None:
        """Test that mu < -1/4 is rejected."""
        with pytest.raises(DomainError, match="mu must be >= -1/4"):
            constants_for(mu)

    @given(mu=st.floats(min_value=-0.25, max_value=10.0))
    def test_tau0_is_root(self, mu: float) -> None:
        """Test tau0^2 - tau0 = mu and sigma = 1 - 2 tau0."""
        consts = constants_for(mu)
        assert consts.tau0**2 - consts.tau0 == pytest.approx(mu, abs=1e-12)
        assert consts.sigma == pytest.approx(1.0 - 2.0 * consts.tau0, abs=1e-15)
        assert consts.tau0 <= 0.5


class TestGaugeConstruction:
    """Test constructors and name parsing."""

    def test_gauge_a_without_alpha_is_gauge_b(self) -> None:
        """Test that alpha = 0 produces the GaugeB tag."""
        assert gauge_a(0.0, 0.75).tag is GaugeTag.GAUGE_B
        assert gauge_a(1.0, 0.75).tag is GaugeTag.GAUGE_A

    @pytest.mark.parametrize("alpha, shift", [(-1.0, 0.0), (1.0, -0.5)])
    def test_gauge_a_rejects_negative_parameters(self, alpha: float, shift: float) -> None:
        """Test alpha >= 0 and shift >= 0."""
        with pytest.raises(DomainError):
            gauge_a(alpha, 0.0, shift)

    @pytest.mark.parametrize(
        "name, tag",
        [
            ("gaugeA:1", GaugeTag.GAUGE_A),
            ("gaugeA:0", GaugeTag.GAUGE_A),
            ("gaugeB", GaugeTag.GAUGE_B),
            ("id", GaugeTag.IDENTITY),
        ],
    )
    def test_names_parse(self, name: str, tag: GaugeTag) -> None:
        """Test that each gauge name gives its tag."""
        assert gauge_from_name(name, 0.75).tag is tag

    def test_gauge_c_needs_critical_mu(self) -> None:
        """Test that gaugeC is only available at mu = -1/4."""
        assert gauge_from_name("gaugeC", MU_CRITICAL).tag is GaugeTag.GAUGE_C
        with pytest.raises(GaugeMismatch, match="requires mu = -1/4"):
            gauge_from_name("gaugeC", 0.0)

    @pytest.mark.parametrize("name", ["gaugeD", "gaugeA:x", ""])
    def test_bad_names_raise(self, name: str) -> None:
        """Test that unknown names are rejected."""
        with pytest.raises(DomainError):
            gauge_from_name(name)

    def test_gauge_for(self) -> None:
        """Test the automatic gauge choice."""
        assert gauge_for(MU_CRITICAL).tag is GaugeTag.GAUGE_C
        assert gauge_for(0.75) == gauge_b(0.75)

    def test_accepts(self) -> None:
        """Test which coupling constants a gauge diagonalizes."""
        assert gauge_c().accepts(MU_CRITICAL)
        assert not gauge_c().accepts(0.0)
        assert gauge_b(0.75).accepts(0.75)
        assert not gauge_b(0.75).accepts(0.0)
        assert identity().accepts(3.0)


class TestCoordinates:
    """Test the coordinate maps and the gauge factor."""

    @pytest.mark.parametrize("gauge", GAUGES.values(), ids=GAUGES.keys())
    def test_round_trip(self, gauge: GaugeTransform) -> None:
        """Test inverse(forward(r)) = r to 1e-13 relative."""
        # Given
        r = np.geomspace(1e-6, 0.999, 2_000)

        # When
        back = gauge.inverse(gauge.forward(r))

        # Then
        np.testing.assert_allclose(back, r, rtol=1e-13)

    @given(r=st.floats(min_value=1e-8, max_value=0.999))
    def test_log_variable(self, r: float) -> None:
        """Test s_of_t(forward(r)) = -ln r."""
        for gauge in GAUGES.values():
            s = float(gauge.s_of_t(gauge.forward(np.asarray(r))))
            assert s == pytest.approx(-math.log(r), rel=1e-12, abs=1e-14)

    @pytest.mark.parametrize("gauge", GAUGES.values(), ids=GAUGES.keys())
    def test_omega_in_both_coordinates(self, gauge: GaugeTransform) -> None:
        """Test omega(r) = omega_t(t(r))."""
        r = np.geomspace(1e-5, 0.9, 50)
        np.testing.assert_allclose(gauge.omega(r), gauge.omega_t(gauge.forward(r)), rtol=1e-12)

    @pytest.mark.parametrize("gauge", GAUGES.values(), ids=GAUGES.keys())
    def test_jacobians_are_reciprocal(self, gauge: GaugeTransform) -> None:
        """Test dr/dt * dt/dr = 1."""
        r = np.geomspace(1e-5, 0.9, 50)
        t = gauge.forward(r)
        np.testing.assert_allclose(gauge.dr_dt(t) * gauge.dt_dr(r), 1.0, rtol=1e-12)

    def test_gauge_c_large_t_does_not_form_radius(self) -> None:
        """Test that the energy weight and s stay finite where r underflows."""
        # Given
        gauge = gauge_c()
        t = np.array([10.0, 50.0, 300.0])

        # Then
        assert np.all(gauge.inverse(t[1:]) == 0.0)
        np.testing.assert_allclose(gauge.energy_weight(t), 2.0 * math.pi, rtol=1e-4)
        assert np.all(np.isfinite(gauge.s_of_t(t[:2])))

    def test_area_between(self) -> None:
        """Test that the whole t-domain covers the unit disk."""
        for gauge in GAUGES.values():
            lo = gauge.t_domain[0]
            assert gauge.area_between(lo, math.inf) == pytest.approx(
                math.pi * float(gauge.inverse(np.asarray(lo))) ** 2, rel=1e-14
            )

    def test_vanishing_endpoints(self) -> None:
        """Test where the gauge factor vanishes."""
        assert gauge_b(-0.1875).vanishing_endpoints == (1.0,)
        assert gauge_c().vanishing_endpoints == (1.0,)
        assert gauge_b(0.75).vanishing_endpoints == (0.0,)
        assert gauge_a(1.0, -0.1875).vanishing_endpoints == ()
        assert gauge_b(0.0).vanishing_endpoints == ()


class TestTransport:
    """Test push and pull between the u-frame and w-frames."""

    def test_plain_frame_is_substitution(self, bump: RadialProfile) -> None:
        """Test w(t) = u(e^(-t/2)) in GaugeB at mu = 0."""
        # Given
        w = push(bump, gauge_b(0.0))
        t = np.linspace(w.support[0], 2.0 * (-math.log(1e-3)), 300)

        # Then
        np.testing.assert_allclose(w(t), bump(np.exp(-t / 2.0)), rtol=1e-12, atol=1e-14)

    def test_gauge_factor_is_divided_out(self) -> None:
        """Test that u = omega on an annulus becomes w = 1."""
        # Given
        gauge = gauge_b(0.75)
        r = np.linspace(0.2, 0.6, 41)
        u = from_samples(r, gauge.omega(r))

        # When
        w = push(u, gauge)
        t = gauge.forward(r[1:-1])

        # Then
        np.testing.assert_allclose(w(t), 1.0, rtol=1e-12)

    @pytest.mark.parametrize("gauge", GAUGES.values(), ids=GAUGES.keys())
    def test_push_then_pull(self, gauge: GaugeTransform, bump: RadialProfile) -> None:
        """Test that pull inverts push."""
        # Given
        r = np.linspace(0.01, 0.9, 200)

        # When
        back = pull(push(bump, gauge))

        # Then
        assert back.frame is Frame.U_FRAME
        np.testing.assert_allclose(back(r), bump(r), rtol=1e-10, atol=1e-13)
        np.testing.assert_allclose(back.derivative(r), bump.derivative(r), rtol=1e-8, atol=1e-10)

    def test_push_rejects_gauge_zero_on_support(self) -> None:
        """Test that a support touching r = 1 cannot be pushed when tau0 > 0."""
        # Given
        r = np.linspace(0.5, 1.0, 11)
        u = from_samples(r, 1.0 - r)

        # Then
        with pytest.raises(DomainError, match="touches r=1.0"):
            push(u, gauge_b(-0.1875))
        assert push(u, gauge_b(0.0)).support[0] == 0.0

    def test_push_and_pull_check_frames(self, moser_10: RadialProfile, bump: RadialProfile) -> None:
        """Test that each direction rejects the wrong frame."""
        with pytest.raises(DomainError, match="u-frame"):
            push(moser_10, gauge_b(0.0))
        with pytest.raises(DomainError, match="w-frame"):
            pull(bump)

    def test_plateau_becomes_log_power_core(self) -> None:
        """Test that a plateau in GaugeB(mu) pulls back to c (-ln r)^tau0 near 0."""
        # Given
        w = moser_family(20, 0.75)
        start, value = w.plateau

        # When
        u = pull(w)

        # Then
        assert u.core is not None
        assert u.core.exponent == pytest.approx(constants_for(0.75).tau0)
        assert u.core.coefficient == value
        assert u.core.radius == pytest.approx(math.exp(-start / 2.0), rel=1e-14)


class TestEnergyIdentity:
    """Test that the gauge form reproduces the deficit."""

    def test_identity_gauge(self, bump: RadialProfile) -> None:
        """Test that the identity gauge has zero residual by definition."""
        assert energy_identity_residual(bump, identity(0.3), 0.3) == 0.0

    def test_mismatch(self, bump: RadialProfile) -> None:
        """Test that a gauge is only used at its own coupling constant."""
        with pytest.raises(GaugeMismatch):
            energy_identity_residual(bump, gauge_b(0.75), 0.0)

    @pytest.mark.parametrize(
        "gauge, mu",
        [
            (gauge_c(), MU_CRITICAL),
            (gauge_b(0.75), 0.75),
            (gauge_b(-0.1875), -0.1875),
            (gauge_a(1.0, -0.1875), -0.1875),
        ],
        ids=["gaugeC", "gaugeB(3/4)", "gaugeB(-3/16)", "gaugeA(1)"],
    )
    def test_bump_residual(self, gauge: GaugeTransform, mu: float, bump: RadialProfile) -> None:
        """Test the identity for a compactly supported smooth bump."""
        assert energy_identity_residual(bump, gauge, mu) < 1e-6

    def test_tent_residual(self, tent_profiles: list[RadialProfile]) -> None:
        """Test the identity for piecewise-linear profiles at the critical constant."""
        for u in tent_profiles:
            assert energy_identity_residual(u, gauge_c(), MU_CRITICAL) < 1e-6
