"""
Gauge substitutions u = omega(r) w together with a coordinate change r <-> t.

Three families are implemented plus the identity:

- GaugeA(alpha, mu): omega = (alpha - ln r)^tau0, t = 2 (alpha - ln r) - shift.
- GaugeB(mu): GaugeA with alpha = 0, so r = exp(-(t + shift) / 2).
- GaugeC: omega = (-ln r)^(1/2), r = exp((1 - e^t) / 2).
- Identity: t = r, omega = 1.

All methods are vectorized over numpy arrays and written so that large t never
forms the underflowing radius when a closed form in s = -ln r exists.
"""

import math
from dataclasses import dataclass, replace

import numpy as np

from src import create_logger
from src.exceptions import DomainError, GaugeMismatch
from src.schemas import SpectralConstants
from src.schemas.profile import LogPowerCore, RadialProfile
from src.schemas.types import FloatArray, Frame, GaugeTag

logger = create_logger(name="transforms")

MU_CRITICAL: float = -0.25


def constants_for(mu: float) -> SpectralConstants:
    """tau0, sigma, nu, m attached to a coupling constant mu >= -1/4.

    Raises
    ------
    DomainError
        If ``mu < -1/4``.
    """
    if not mu >= MU_CRITICAL:
        raise DomainError(f"mu must be >= -1/4, got mu={mu!r}")
    sigma = math.sqrt(1.0 + 4.0 * mu)
    tau0 = (1.0 - sigma) / 2.0
    m = 4.0 * math.pi * sigma
    if sigma == 0.0:
        nu = None
    else:
        # f(sigma) = sigma^2 / (2 sigma + 2 tau0 - 1) reduces to sigma.
        nu = (2.0 ** (2.0 - 2.0 * tau0) * math.pi * sigma) ** -0.5
    return SpectralConstants(mu=float(mu), tau0=tau0, sigma=sigma, nu=nu, m=m)


@dataclass(frozen=True)
class GaugeTransform:
    """A coordinate map r <-> t with gauge factor omega.

    Use the constructors `gauge_a`, `gauge_b`, `gauge_c` and `identity`.
    """

    tag: GaugeTag
    mu: float
    tau0: float
    alpha: float = 0.0
    shift: float = 0.0

    # ===== Naming =====
    @property
    def name(self) -> str:
        match self.tag:
            case GaugeTag.GAUGE_A:
                return f"gaugeA:{self.alpha!r}"
            case _:
                return self.tag.value

    @property
    def is_log_frame(self) -> bool:
        """GaugeA/B frames, where t is affine in ln r."""
        return self.tag in (GaugeTag.GAUGE_A, GaugeTag.GAUGE_B)

    @property
    def omega_exponent(self) -> float:
        """Power of the log variable in omega."""
        match self.tag:
            case GaugeTag.GAUGE_C:
                return 0.5
            case GaugeTag.IDENTITY:
                return 0.0
            case _:
                return self.tau0

    @property
    def t_domain(self) -> tuple[float, float]:
        match self.tag:
            case GaugeTag.GAUGE_C:
                return (0.0, math.inf)
            case GaugeTag.IDENTITY:
                return (0.0, 1.0)
            case _:
                return (2.0 * self.alpha - self.shift, math.inf)

    @property
    def vanishing_endpoints(self) -> tuple[float, ...]:
        """Radii in {0, 1} where omega tends to 0."""
        exponent = self.omega_exponent
        if exponent > 0 and self.alpha == 0.0 and self.tag is not GaugeTag.IDENTITY:
            return (1.0,)
        if exponent < 0:
            return (0.0,)
        return ()

    def accepts(self, mu: float, atol: float = 1e-12) -> bool:
        """Whether the deficit form of this gauge is the mu-deficit."""
        match self.tag:
            case GaugeTag.IDENTITY:
                return True
            case GaugeTag.GAUGE_C:
                return abs(mu - MU_CRITICAL) <= atol
            case _:
                return abs(mu - self.mu) <= atol

    # ===== Coordinates =====
    def forward(self, r: FloatArray) -> FloatArray:
        """t as a function of r."""
        r = np.asarray(r, dtype=np.float64)
        with np.errstate(divide="ignore"):
            match self.tag:
                case GaugeTag.GAUGE_C:
                    return np.log1p(-2.0 * np.log(r))
                case GaugeTag.IDENTITY:
                    return r
                case _:
                    return 2.0 * (self.alpha - np.log(r)) - self.shift

    def inverse(self, t: FloatArray) -> FloatArray:
        """r as a function of t."""
        t = np.asarray(t, dtype=np.float64)
        with np.errstate(over="ignore"):
            match self.tag:
                case GaugeTag.GAUGE_C:
                    return np.exp(-np.expm1(t) / 2.0)
                case GaugeTag.IDENTITY:
                    return t
                case _:
                    return np.exp(self.alpha - (t + self.shift) / 2.0)

    def s_of_t(self, t: FloatArray) -> FloatArray:
        """s = -ln r as a function of t."""
        t = np.asarray(t, dtype=np.float64)
        with np.errstate(over="ignore", divide="ignore"):
            match self.tag:
                case GaugeTag.GAUGE_C:
                    return np.expm1(t) / 2.0
                case GaugeTag.IDENTITY:
                    return -np.log(t)
                case _:
                    return (t + self.shift) / 2.0 - self.alpha

    def ds_dt(self, t: FloatArray) -> FloatArray:
        t = np.asarray(t, dtype=np.float64)
        with np.errstate(over="ignore", divide="ignore"):
            match self.tag:
                case GaugeTag.GAUGE_C:
                    return np.exp(t) / 2.0
                case GaugeTag.IDENTITY:
                    return -1.0 / t
                case _:
                    return np.full_like(t, 0.5)

    def log_variable(self, t: FloatArray) -> FloatArray:
        """The logarithmic variable the gauge factor is a power of (alpha - ln r or -ln r)."""
        if self.is_log_frame:
            return (np.asarray(t, dtype=np.float64) + self.shift) / 2.0
        return self.s_of_t(t)

    def dr_dt(self, t: FloatArray) -> FloatArray:
        t = np.asarray(t, dtype=np.float64)
        r = self.inverse(t)
        with np.errstate(over="ignore", invalid="ignore"):
            match self.tag:
                case GaugeTag.GAUGE_C:
                    return -r * np.exp(t) / 2.0
                case GaugeTag.IDENTITY:
                    return np.ones_like(t)
                case _:
                    return -r / 2.0

    def dt_dr(self, r: FloatArray) -> FloatArray:
        r = np.asarray(r, dtype=np.float64)
        with np.errstate(divide="ignore"):
            match self.tag:
                case GaugeTag.GAUGE_C:
                    return -2.0 / (r * (1.0 - 2.0 * np.log(r)))
                case GaugeTag.IDENTITY:
                    return np.ones_like(r)
                case _:
                    return -2.0 / r

    # ===== Gauge factor =====
    def omega(self, r: FloatArray) -> FloatArray:
        """omega as a function of r."""
        r = np.asarray(r, dtype=np.float64)
        with np.errstate(divide="ignore", invalid="ignore"):
            match self.tag:
                case GaugeTag.GAUGE_C:
                    return np.sqrt(-np.log(r))
                case GaugeTag.IDENTITY:
                    return np.ones_like(r)
                case _:
                    return (self.alpha - np.log(r)) ** self.tau0

    def omega_t(self, t: FloatArray) -> FloatArray:
        """omega as a function of t."""
        t = np.asarray(t, dtype=np.float64)
        if self.tag is GaugeTag.IDENTITY:
            return np.ones_like(t)
        with np.errstate(divide="ignore", invalid="ignore"):
            return self.log_variable(t) ** self.omega_exponent

    def omega_dt(self, t: FloatArray) -> FloatArray:
        """d omega / dt."""
        t = np.asarray(t, dtype=np.float64)
        exponent = self.omega_exponent
        if exponent == 0.0:
            return np.zeros_like(t)
        lam = self.log_variable(t)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            return exponent * lam ** (exponent - 1.0) * self.ds_dt(t)

    # ===== Weights of the quadratic forms in t =====
    def energy_weight(self, t: FloatArray) -> FloatArray:
        """Weight of w'(t)^2 in the gauge-frame deficit form."""
        t = np.asarray(t, dtype=np.float64)
        match self.tag:
            case GaugeTag.GAUGE_C:
                return -2.0 * math.pi * np.expm1(-t)
            case GaugeTag.IDENTITY:
                return 2.0 * math.pi * t
            case _:
                factor = 2.0 ** (2.0 - 2.0 * self.tau0) * math.pi
                with np.errstate(divide="ignore", invalid="ignore"):
                    return factor * (t + self.shift) ** (2.0 * self.tau0)

    def dirichlet_weight(self, t: FloatArray) -> FloatArray:
        """2 pi r / |dr/dt|: weight of u_t^2 in the Dirichlet energy."""
        t = np.asarray(t, dtype=np.float64)
        match self.tag:
            case GaugeTag.GAUGE_C:
                return 4.0 * math.pi * np.exp(-t)
            case GaugeTag.IDENTITY:
                return 2.0 * math.pi * t
            case _:
                return np.full_like(t, 4.0 * math.pi)

    def log_area_element(self, t: FloatArray) -> FloatArray:
        """log of 2 pi r |dr/dt|, the area element of B_1 per unit t."""
        t = np.asarray(t, dtype=np.float64)
        with np.errstate(divide="ignore", over="ignore"):
            match self.tag:
                case GaugeTag.GAUGE_C:
                    return math.log(math.pi) - np.expm1(t) + t
                case GaugeTag.IDENTITY:
                    return np.log(2.0 * math.pi * t)
                case _:
                    return math.log(math.pi) + 2.0 * self.alpha - (t + self.shift)

    def area_between(self, t_lo: float, t_hi: float) -> float:
        """Area of the annulus whose t-range is [t_lo, t_hi]."""
        r_a = float(self.inverse(np.asarray(t_lo)))
        r_b = float(self.inverse(np.asarray(t_hi))) if math.isfinite(t_hi) else 0.0
        if self.tag is GaugeTag.IDENTITY:
            r_a, r_b = r_b, r_a
        return math.pi * abs(r_a**2 - r_b**2)

    # ===== u <-> w in t =====
    def u_and_derivative(
        self, t: FloatArray, w: FloatArray, w_t: FloatArray
    ) -> tuple[FloatArray, FloatArray]:
        """u = omega w and du/dt from w and dw/dt."""
        om = self.omega_t(t)
        with np.errstate(invalid="ignore", over="ignore"):
            return om * w, self.omega_dt(t) * w + om * w_t

    def dirichlet_density(self, t: FloatArray, w: FloatArray, w_t: FloatArray) -> FloatArray:
        """Integrand of the Dirichlet energy of u = omega w in t."""
        t = np.asarray(t, dtype=np.float64)
        if self.tag is GaugeTag.GAUGE_C:
            # Grouped as (e^{-t/2} u_t)^2 so that no e^t is formed.
            q = -np.expm1(-t) / 2.0
            with np.errstate(divide="ignore", invalid="ignore"):
                scaled = w / (4.0 * np.sqrt(q)) + np.sqrt(q) * w_t
            return 4.0 * math.pi * np.where(w == 0.0, q * w_t**2, scaled**2)
        _, u_t = self.u_and_derivative(t, w, w_t)
        return self.dirichlet_weight(t) * u_t**2

    def leray_density(self, t: FloatArray, w: FloatArray) -> FloatArray:
        """Integrand of int u^2 / (r^2 ln^2 r) dx in t."""
        t = np.asarray(t, dtype=np.float64)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            match self.tag:
                case GaugeTag.GAUGE_C:
                    q = -np.expm1(-t) / 2.0
                    return np.where(w == 0.0, 0.0, math.pi * w**2 / q)
                case GaugeTag.IDENTITY:
                    return 2.0 * math.pi * w**2 / (t * np.log(t) ** 2)
                case _:
                    u, _ = self.u_and_derivative(t, w, np.zeros_like(w))
                    return math.pi * u**2 / self.s_of_t(t) ** 2

    def potential_density(self, t: FloatArray, w: FloatArray, r2v: FloatArray) -> FloatArray:
        """Integrand of int V u^2 dx in t, given r^2 V as a function of t."""
        t = np.asarray(t, dtype=np.float64)
        u, _ = self.u_and_derivative(t, w, np.zeros_like(w))
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            match self.tag:
                case GaugeTag.GAUGE_C:
                    log_area = math.log(math.pi) + t
                    out = np.exp(log_area + np.log(r2v) + 2.0 * np.log(np.abs(u)))
                case GaugeTag.IDENTITY:
                    out = 2.0 * math.pi * r2v * u**2 / t
                case _:
                    out = math.pi * r2v * u**2
        return np.where(u == 0.0, 0.0, out)

    def gauge_potential(self, r: FloatArray) -> FloatArray:
        """The potential 1/(r^2 (alpha - ln r)^2) whose mu-deficit this gauge diagonalizes."""
        r = np.asarray(r, dtype=np.float64)
        with np.errstate(divide="ignore"):
            return 1.0 / (r**2 * (self.alpha - np.log(r)) ** 2)


# ===== Constructors =====
def gauge_a(alpha: float = 0.0, mu: float = 0.0, shift: float = 0.0) -> GaugeTransform:
    """omega = (alpha - ln r)^tau0 with t = 2 (alpha - ln r) - shift."""
    if alpha < 0:
        raise DomainError(f"GaugeA needs alpha >= 0, got alpha={alpha!r}")
    if shift < 0:
        raise DomainError(f"shift must be >= 0, got shift={shift!r}")
    consts = constants_for(mu)
    tag = GaugeTag.GAUGE_B if alpha == 0.0 else GaugeTag.GAUGE_A
    return GaugeTransform(tag=tag, mu=float(mu), tau0=consts.tau0, alpha=alpha, shift=shift)


def gauge_b(mu: float = 0.0, shift: float = 0.0) -> GaugeTransform:
    """omega = (-ln r)^tau0 with r = exp(-(t + shift) / 2)."""
    return gauge_a(0.0, mu, shift)


def gauge_c() -> GaugeTransform:
    """omega = (-ln r)^(1/2) with r = exp((1 - e^t) / 2); mu = -1/4."""
    return GaugeTransform(tag=GaugeTag.GAUGE_C, mu=MU_CRITICAL, tau0=0.5)


def identity(mu: float = 0.0) -> GaugeTransform:
    return GaugeTransform(tag=GaugeTag.IDENTITY, mu=float(mu), tau0=0.0)


def gauge_for(mu: float) -> GaugeTransform:
    """GaugeC at mu = -1/4, GaugeB(mu) above."""
    constants_for(mu)
    return gauge_c() if mu == MU_CRITICAL else gauge_b(mu)


def gauge_from_name(name: str, mu: float = 0.0) -> GaugeTransform:
    """Parse ``gaugeA:<alpha>``, ``gaugeB``, ``gaugeC`` or ``id``."""
    head, _, arg = name.strip().partition(":")
    match head:
        case "gaugeA":
            try:
                alpha = float(arg) if arg else 0.0
            except ValueError:
                raise DomainError(f"invalid GaugeA parameter in {name!r}") from None
            gauge = gauge_a(alpha, mu)
            return gauge if alpha else replace(gauge, tag=GaugeTag.GAUGE_A)
        case "gaugeB":
            return gauge_b(mu)
        case "gaugeC":
            if mu != MU_CRITICAL:
                raise GaugeMismatch(f"gaugeC requires mu = -1/4, got mu={mu!r}")
            return gauge_c()
        case "id":
            return identity(mu)
    raise DomainError(f"unknown gauge {name!r}; expected gaugeA:<alpha>, gaugeB, gaugeC, id")


# ===== Profile transport =====
def _check_push_support(profile: RadialProfile, gauge: GaugeTransform) -> None:
    lo, hi = profile.support
    if lo < 0.0 or hi > 1.0:
        raise DomainError(f"u-frame support [{lo!r}, {hi!r}] leaves (0, 1]")
    for endpoint in gauge.vanishing_endpoints:
        touches = hi >= 1.0 if endpoint == 1.0 else lo <= 0.0
        if touches:
            raise DomainError(
                f"support [{lo!r}, {hi!r}] touches r={endpoint!r} where the "
                f"{gauge.name!r} gauge factor vanishes"
            )


def push(profile: RadialProfile, gauge: GaugeTransform) -> RadialProfile:
    """w(t) = u(r(t)) / omega(r(t)) as a w-frame profile of ``gauge``.

    Raises
    ------
    DomainError
        If the profile is not in the u-frame or its support touches an endpoint
        where the gauge factor vanishes.
    """
    if profile.frame is not Frame.U_FRAME:
        raise DomainError("push expects a u-frame profile")
    _check_push_support(profile, gauge)
    lo, hi = profile.support
    t_lo = float(gauge.forward(np.asarray(hi)))
    t_hi = math.inf if lo <= 0.0 else float(gauge.forward(np.asarray(lo)))
    if gauge.tag is GaugeTag.IDENTITY:
        t_lo, t_hi = lo, hi
    t_lo = max(t_lo, gauge.t_domain[0])
    core = None if gauge.tag is GaugeTag.IDENTITY else profile.core
    t_core = math.inf if core is None else float(gauge.forward(np.asarray(core.radius)))
    u_func, u_deriv = profile.__call__, profile.derivative

    def func(t: FloatArray) -> FloatArray:
        t = np.asarray(t, dtype=np.float64)
        with np.errstate(all="ignore"):
            w = u_func(gauge.inverse(t)) / gauge.omega_t(t)
            if core is not None:
                s = gauge.s_of_t(t)
                w_core = core.coefficient * s**core.exponent / gauge.omega_t(t)
                w = np.where(t >= t_core, w_core, w)
        return np.where(np.isfinite(w), w, 0.0)

    def deriv(t: FloatArray) -> FloatArray:
        t = np.asarray(t, dtype=np.float64)
        with np.errstate(all="ignore"):
            r = gauge.inverse(t)
            om, om_t = gauge.omega_t(t), gauge.omega_dt(t)
            u_t = u_deriv(r) * gauge.dr_dt(t)
            w_t = (u_t * om - u_func(r) * om_t) / om**2
            if core is not None:
                s, s_t = gauge.s_of_t(t), gauge.ds_dt(t)
                lam, e, k = gauge.log_variable(t), core.exponent, gauge.omega_exponent
                core_t = (
                    core.coefficient
                    * s_t
                    * (e * s ** (e - 1.0) * lam**-k - k * s**e * lam ** (-k - 1.0))
                )
                w_t = np.where(t >= t_core, core_t, w_t)
        return np.where(np.isfinite(w_t), w_t, 0.0)

    plateau = None
    if core is not None and math.isinf(t_hi):
        same_power = core.exponent == gauge.omega_exponent
        if same_power and (gauge.alpha == 0.0 or gauge.tag is GaugeTag.GAUGE_C):
            plateau = (t_core, core.coefficient)
    breakpoints = sorted(
        float(gauge.forward(np.asarray(b)))
        for b in (*profile.breakpoints, lo, hi)
        if 0.0 < b <= 1.0
    )
    if core is not None and math.isfinite(t_core):
        breakpoints.append(t_core)
    mapped = gauge.forward(profile.nodes[(profile.nodes > 0.0) & (profile.nodes <= 1.0)])
    nodes = np.unique(np.concatenate([mapped, np.asarray(breakpoints), [t_lo]]))
    nodes = nodes[np.isfinite(nodes) & (nodes >= t_lo)]
    logger.debug(f"pushed {profile.family!r} into {gauge.name!r}: t in [{t_lo!r}, {t_hi!r}]")
    return RadialProfile(
        frame=Frame.W_FRAME,
        func=func,
        deriv=deriv,
        nodes=nodes,
        support=(t_lo, t_hi),
        breakpoints=tuple(sorted(set(b for b in breakpoints if b >= t_lo))),
        gauge=gauge,
        plateau=plateau,
        offset=profile.offset,
        family=profile.family,
        params=profile.params,
    )


def pull(profile: RadialProfile, gauge: GaugeTransform | None = None) -> RadialProfile:
    """u(r) = omega(r) w(t(r)) as a u-frame profile."""
    if profile.frame is not Frame.W_FRAME:
        raise DomainError("pull expects a w-frame profile")
    gauge = gauge or profile.gauge
    assert gauge is not None
    t_lo, t_hi = profile.support
    w_func, w_deriv = profile.__call__, profile.derivative
    if gauge.tag is GaugeTag.IDENTITY:
        r_lo, r_hi = t_lo, t_hi
    else:
        r_hi = min(1.0, float(gauge.inverse(np.asarray(t_lo))))
        r_lo = 0.0 if math.isinf(t_hi) else float(gauge.inverse(np.asarray(t_hi)))

    def func(r: FloatArray) -> FloatArray:
        r = np.asarray(r, dtype=np.float64)
        with np.errstate(all="ignore"):
            out = gauge.omega(r) * w_func(gauge.forward(r))
        return np.where(np.isfinite(out), out, 0.0)

    def deriv(r: FloatArray) -> FloatArray:
        r = np.asarray(r, dtype=np.float64)
        with np.errstate(all="ignore"):
            t = gauge.forward(r)
            om_r = gauge.omega_dt(t) * gauge.dt_dr(r)
            out = om_r * w_func(t) + gauge.omega(r) * w_deriv(t) * gauge.dt_dr(r)
        return np.where(np.isfinite(out), out, 0.0)

    core = None
    if profile.plateau is not None and (gauge.alpha == 0.0 or gauge.tag is GaugeTag.GAUGE_C):
        start, value = profile.plateau
        core = LogPowerCore(
            radius=float(gauge.inverse(np.asarray(start))),
            coefficient=value,
            exponent=gauge.omega_exponent,
        )
    breakpoints = tuple(
        sorted(
            float(gauge.inverse(np.asarray(b)))
            for b in (*profile.breakpoints, t_lo)
            if math.isfinite(b)
        )
    )
    nodes = np.unique(gauge.inverse(profile.nodes))
    nodes = nodes[(nodes > 0.0) & (nodes >= r_lo) & (nodes <= r_hi)]
    return RadialProfile(
        frame=Frame.U_FRAME,
        func=func,
        deriv=deriv,
        nodes=nodes,
        support=(r_lo, r_hi),
        breakpoints=breakpoints,
        gauge=None,
        core=core,
        offset=profile.offset,
        family=profile.family,
        params=profile.params,
    )


def energy_identity_residual(u: RadialProfile, gauge: GaugeTransform, mu: float) -> float:
    """|I_mu(u) - RHS(gauge)| / max(1, |I_mu(u)|).

    The left side is the mu-deficit with the gauge's potential
    1/(r^2 (alpha - ln r)^2), computed in the plain log frame t = -2 ln r; the
    right side is the gauge-frame form of the pushed profile. Boundary terms
    are not added.

    Raises
    ------
    GaugeMismatch
        If ``mu`` is not the coupling constant of the gauge.
    """
    if not gauge.accepts(mu):
        raise GaugeMismatch(
            f"{gauge.name!r} diagonalizes mu={gauge.mu!r}, not mu={mu!r}"
        )
    if gauge.tag is GaugeTag.IDENTITY:
        return 0.0
    from src.logic import quadrature

    u_frame = u if u.frame is Frame.U_FRAME else pull(u)
    lhs = quadrature.plain_deficit(u_frame, mu, alpha=gauge.alpha)
    rhs = quadrature.gauge_energy(push(u_frame, gauge) if u.frame is Frame.U_FRAME else u)
    residual = abs(lhs - rhs) / max(1.0, abs(lhs))
    logger.debug(f"identity residual in {gauge.name!r}: lhs={lhs!r} rhs={rhs!r}")
    return residual
