"""
Explicit trial and extremal families as RadialProfile objects.

Every family has closed-form values and derivatives; the w-frame families carry
the gauge they are written in.
"""

import math
from dataclasses import replace

import numpy as np

from src import create_logger
from src.config import app_config
from src.exceptions import DomainError
from src.logic.transforms import (
    MU_CRITICAL,
    GaugeTransform,
    constants_for,
    gauge_a,
    gauge_b,
    gauge_c,
    push,
)
from src.schemas.profile import LogPowerCore, RadialProfile, from_samples
from src.schemas.types import FamilyName, FloatArray, Frame, PlateauRamp, Smoothness

logger = create_logger(name="profiles")

# Integral of the squared quintic smoothstep over [0, 1].
SMOOTHSTEP_SQUARE_INTEGRAL: float = 181.0 / 462.0


# ===== Smooth transitions =====
def smoothstep(x: FloatArray) -> FloatArray:
    """6x^5 - 15x^4 + 10x^3 on [0, 1], clamped to 0 and 1 outside."""
    x = np.clip(np.asarray(x, dtype=np.float64), 0.0, 1.0)
    return x**3 * (x * (6.0 * x - 15.0) + 10.0)


def smoothstep_derivative(x: FloatArray) -> FloatArray:
    x = np.asarray(x, dtype=np.float64)
    inside = (x > 0.0) & (x < 1.0)
    return np.where(inside, 30.0 * x**2 * (1.0 - x) ** 2, 0.0)


def smoothstep_antiderivative(x: FloatArray) -> FloatArray:
    """Integral of the clamped smoothstep from -inf to x."""
    x = np.asarray(x, dtype=np.float64)
    xc = np.clip(x, 0.0, 1.0)
    ramp = xc**4 * (xc * (xc - 3.0) + 2.5)
    return np.where(x >= 1.0, x - 0.5, ramp)


def _grid(*pieces: FloatArray) -> FloatArray:
    nodes = np.unique(np.concatenate([np.atleast_1d(p) for p in pieces]))
    return nodes[np.isfinite(nodes)]


# ===== Families =====
def zeta_t1(t1: float, tau0: float = 0.0, grid_nodes: int | None = None) -> RadialProfile:
    """Minimizer of the weighted one-dimensional energy with fixed value at t1.

    zeta(t) = C (t^(1 - 2 tau0) - 2^(1 - 2 tau0)) on [2, t1] and constant beyond,
    with C = (t1^(1 - 2 tau0) - 2^(1 - 2 tau0))^(-1/2). Written in the GaugeA
    frame with alpha = 1, whose t-domain starts at 2.

    Raises
    ------
    DomainError
        If ``t1 <= 2`` or ``tau0 >= 1/2``.
    """
    if not t1 > 2.0:
        raise DomainError(f"t1 must exceed 2, got t1={t1!r}")
    if not tau0 < 0.5:
        raise DomainError(f"tau0 must be below 1/2, got tau0={tau0!r}")
    grid_nodes = grid_nodes or app_config.profiles.grid_nodes
    exponent = 1.0 - 2.0 * tau0
    base = 2.0**exponent
    span = t1**exponent - base
    coefficient = span**-0.5
    gauge = replace(gauge_a(1.0, tau0**2 - tau0), tau0=tau0)

    def func(t: FloatArray) -> FloatArray:
        return coefficient * (np.clip(t, 2.0, t1) ** exponent - base)

    def deriv(t: FloatArray) -> FloatArray:
        inside = (t >= 2.0) & (t < t1)
        return np.where(inside, coefficient * exponent * np.abs(t) ** (-2.0 * tau0), 0.0)

    return RadialProfile(
        frame=Frame.W_FRAME,
        func=func,
        deriv=deriv,
        nodes=_grid(np.linspace(2.0, t1, grid_nodes), [1.5 * t1, 2.0 * t1]),
        support=(2.0, math.inf),
        breakpoints=(2.0, t1),
        gauge=gauge,
        plateau=(t1, coefficient * span),
        family=FamilyName.ZETA_T1.value,
        params={"t1": t1, "tau0": tau0, "coefficient": coefficient},
    )


def moser_family(n: int, mu: float = 0.0, grid_nodes: int | None = None) -> RadialProfile:
    """w_n(t) = nu n^(1/2 - tau0) zeta_sigma(t / n) in the GaugeB(mu) frame.

    zeta_sigma(x) = x^sigma on [0, 1) and 1 beyond, so the GaugeB energy is 1.

    Raises
    ------
    DomainError
        If ``n < 2`` or ``mu <= -1/4``.
    """
    if n < 2:
        raise DomainError(f"n must be >= 2, got n={n!r}")
    if not mu > MU_CRITICAL:
        raise DomainError(f"the Moser family needs mu > -1/4, got mu={mu!r}")
    grid_nodes = grid_nodes or app_config.profiles.grid_nodes
    consts = constants_for(mu)
    sigma, tau0 = consts.sigma, consts.tau0
    assert consts.nu is not None
    amplitude = consts.nu * n ** (0.5 - tau0)

    def func(t: FloatArray) -> FloatArray:
        return amplitude * np.clip(t / n, 0.0, 1.0) ** sigma

    def deriv(t: FloatArray) -> FloatArray:
        inside = (t > 0.0) & (t < n)
        with np.errstate(divide="ignore"):
            slope = amplitude * sigma * np.abs(t / n) ** (sigma - 1.0) / n
        return np.where(inside, slope, 0.0)

    # Geometric refinement toward t = 0 where zeta_sigma' is unbounded for sigma < 1.
    nodes = _grid([0.0], np.geomspace(n * 1e-10, n, grid_nodes), [1.5 * n, 2.0 * n])
    return RadialProfile(
        frame=Frame.W_FRAME,
        func=func,
        deriv=deriv,
        nodes=nodes,
        support=(0.0, math.inf),
        breakpoints=(0.0, float(n)),
        gauge=gauge_b(mu),
        plateau=(float(n), amplitude),
        family=FamilyName.MOSER.value,
        params={
            "n": float(n),
            "mu": mu,
            "sigma": sigma,
            "tau0": tau0,
            "nu": consts.nu,
            "amplitude": amplitude,
        },
    )


def _eta(kappa: float, t: FloatArray) -> FloatArray:
    return smoothstep(t - 1.0) - smoothstep(t - (kappa - 1.0))


def _eta_derivative(kappa: float, t: FloatArray) -> FloatArray:
    return smoothstep_derivative(t - 1.0) - smoothstep_derivative(t - (kappa - 1.0))


def _eta_antiderivative(kappa: float, t: FloatArray) -> FloatArray:
    return smoothstep_antiderivative(t - 1.0) - smoothstep_antiderivative(t - (kappa - 1.0))


def _check_kappa(kappa: float) -> None:
    if not kappa > 4.0:
        raise DomainError(f"kappa must exceed 4, got kappa={kappa!r}")


def cutoff_eta(kappa: float, grid_nodes: int | None = None) -> RadialProfile:
    """Smooth cutoff: 0 up to 1, rising on [1, 2], 1 on [2, kappa - 1], 0 from kappa."""
    _check_kappa(kappa)
    grid_nodes = grid_nodes or app_config.profiles.grid_nodes
    joints = (1.0, 2.0, kappa - 1.0, kappa)
    return RadialProfile(
        frame=Frame.W_FRAME,
        func=lambda t: _eta(kappa, t),
        deriv=lambda t: _eta_derivative(kappa, t),
        nodes=_grid(np.linspace(1.0, kappa, grid_nodes), joints),
        support=(1.0, kappa),
        breakpoints=joints,
        gauge=gauge_c(),
        family="eta",
        params={"kappa": kappa},
    )


def wkappa_constants(kappa: float) -> tuple[float, float]:
    """(b1, b2): the integral of eta_kappa and the GaugeC norm of phi_kappa."""
    _check_kappa(kappa)
    b1 = kappa - 2.0
    b2 = math.sqrt(4.0 * math.pi * (kappa - 3.0 + 2.0 * SMOOTHSTEP_SQUARE_INTEGRAL))
    return b1, b2


def wkappa_family(kappa: float, grid_nodes: int | None = None) -> RadialProfile:
    """w_kappa = (1 / b2) * integral of phi_kappa = eta_kappa(t) - eta_kappa(t - 2 kappa).

    Rises on [1, kappa], equals b1 / b2 on [kappa, 2 kappa + 1] and returns to 0
    at 3 kappa. Carried in the GaugeC frame.
    """
    b1, b2 = wkappa_constants(kappa)
    grid_nodes = grid_nodes or app_config.profiles.grid_nodes
    shift = 2.0 * kappa

    def func(t: FloatArray) -> FloatArray:
        return (_eta_antiderivative(kappa, t) - _eta_antiderivative(kappa, t - shift)) / b2

    def deriv(t: FloatArray) -> FloatArray:
        return (_eta(kappa, t) - _eta(kappa, t - shift)) / b2

    joints = (1.0, 2.0, kappa - 1.0, kappa)
    breakpoints = tuple(sorted({*joints, *(j + shift for j in joints)}))
    return RadialProfile(
        frame=Frame.W_FRAME,
        func=func,
        deriv=deriv,
        nodes=_grid(np.linspace(1.0, 3.0 * kappa, grid_nodes), breakpoints),
        support=(1.0, 3.0 * kappa),
        breakpoints=breakpoints,
        gauge=gauge_c(),
        family=FamilyName.WKAPPA.value,
        params={"kappa": kappa, "b1": b1, "b2": b2, "plateau": b1 / b2},
    )


def _ramp(ramp: PlateauRamp, x: FloatArray) -> tuple[FloatArray, FloatArray]:
    x = np.asarray(x, dtype=np.float64)
    match ramp:
        case PlateauRamp.LINEAR:
            value = np.clip(x, 0.0, 1.0)
            slope = np.where((x >= 0.0) & (x < 1.0), 1.0, 0.0)
        case PlateauRamp.FOUR_PIECE:
            value = np.select(
                [x < 0.25, x < 0.5, x < 1.0], [0.0 * x, 2.0 * x - 0.5, x], default=1.0
            )
            slope = np.select(
                [x < 0.25, x < 0.5, x < 1.0],
                [0.0 * x, 2.0 + 0.0 * x, 1.0 + 0.0 * x],
                default=0.0,
            )
    return value, slope


def plateau_family(
    n: int,
    *,
    offset: float = 0.5,
    radius: float = 0.25,
    ramp: PlateauRamp = PlateauRamp.LINEAR,
    grid_nodes: int | None = None,
) -> RadialProfile:
    """w_n(t) = sqrt(n / 4 pi) zeta(t / n), radial about a point at distance ``offset``.

    The profile is a function of r = |x - x0| supported in r < ``radius``, carried
    in the frame t = -2 ln r + 2 ln(radius) so that t = 0 at the edge of the
    bump. The LINEAR ramp has energy 4 pi int w'^2 dt = 1; the FOUR_PIECE ramp
    (0, 2x - 1/2, x, 1 on the quarters of [0, 1]) has energy 3/2.

    Raises
    ------
    DomainError
        If ``n < 8`` or the ball of ``radius`` about the offset point is not
        inside the punctured unit disk.
    """
    if n < 8:
        raise DomainError(f"n must be >= 8, got n={n!r}")
    if not (0.0 < radius < offset and offset + radius < 1.0):
        raise DomainError(
            f"ball of radius {radius!r} about |x0|={offset!r} must avoid 0 and stay in B_1"
        )
    grid_nodes = grid_nodes or app_config.profiles.grid_nodes
    amplitude = math.sqrt(n / (4.0 * math.pi))
    start = 0.25 * n if ramp is PlateauRamp.FOUR_PIECE else 0.0

    def func(t: FloatArray) -> FloatArray:
        return amplitude * _ramp(ramp, t / n)[0]

    def deriv(t: FloatArray) -> FloatArray:
        return amplitude * _ramp(ramp, t / n)[1] / n

    breakpoints = (0.0, 0.25 * n, 0.5 * n, float(n))
    return RadialProfile(
        frame=Frame.W_FRAME,
        func=func,
        deriv=deriv,
        nodes=_grid(np.linspace(0.0, n, grid_nodes), [1.5 * n, 2.0 * n]),
        support=(start, math.inf),
        breakpoints=breakpoints,
        gauge=gauge_b(0.0, shift=-2.0 * math.log(radius)),
        plateau=(float(n), amplitude),
        offset=offset,
        family=FamilyName.PLATEAU.value,
        params={"n": float(n), "radius": radius, "amplitude": amplitude},
    )


def concentrating_family(
    n: int, mu: float, t_eps: float = 0.0, grid_nodes: int | None = None
) -> RadialProfile:
    """Unit-energy family of the shifted GaugeB(mu) frame for mu in (-1/4, 0).

    w_n = nu n^(1/2 - tau0) (t / n)^sigma on [1, n], linear through 0 on [0, 1]
    and constant beyond n. The frame is t = -2 ln r - t_eps, so the weight of the
    energy is (t + t_eps)^(2 tau0).

    Raises
    ------
    DomainError
        If ``mu`` is outside (-1/4, 0), ``n < 2`` or ``t_eps < 0``.
    """
    if not MU_CRITICAL < mu < 0.0:
        raise DomainError(f"mu must lie in (-1/4, 0), got mu={mu!r}")
    if n < 2:
        raise DomainError(f"n must be >= 2, got n={n!r}")
    if t_eps < 0.0:
        raise DomainError(f"t_eps must be >= 0, got t_eps={t_eps!r}")
    grid_nodes = grid_nodes or app_config.profiles.grid_nodes
    consts = constants_for(mu)
    sigma, tau0 = consts.sigma, consts.tau0
    assert consts.nu is not None
    amplitude = consts.nu * n ** (0.5 - tau0)
    slope0 = amplitude * n**-sigma

    def func(t: FloatArray) -> FloatArray:
        t = np.asarray(t, dtype=np.float64)
        inner = slope0 * np.clip(t, 0.0, 1.0)
        outer = amplitude * np.clip(t / n, 0.0, 1.0) ** sigma
        return np.where(t < 1.0, inner, outer)

    def deriv(t: FloatArray) -> FloatArray:
        t = np.asarray(t, dtype=np.float64)
        with np.errstate(divide="ignore"):
            middle = amplitude * sigma * np.abs(t) ** (sigma - 1.0) * n**-sigma
        return np.select([t < 0.0, t < 1.0, t < n], [0.0 * t, slope0 + 0.0 * t, middle], 0.0)

    nodes = _grid(
        np.linspace(0.0, 1.0, 65), np.geomspace(1.0, n, grid_nodes), [1.5 * n, 2.0 * n]
    )
    return RadialProfile(
        frame=Frame.W_FRAME,
        func=func,
        deriv=deriv,
        nodes=nodes,
        support=(0.0, math.inf),
        breakpoints=(0.0, 1.0, float(n)),
        gauge=gauge_b(mu, shift=t_eps),
        plateau=(float(n), amplitude),
        family=FamilyName.CONCENTRATING.value,
        params={
            "n": float(n),
            "mu": mu,
            "t_eps": t_eps,
            "sigma": sigma,
            "tau0": tau0,
            "nu": consts.nu,
            "amplitude": amplitude,
        },
    )


def concentrating_energy_excess(n: int, mu: float) -> float:
    """Closed-form energy minus 1 of the unshifted concentrating family."""
    consts = constants_for(mu)
    sigma = consts.sigma
    return n**-sigma * (1.0 / (sigma * (2.0 - sigma)) - 1.0)


def h0_profile(grid_nodes: int | None = None) -> RadialProfile:
    """h0(r) = (-ln r)^(1/2) eta0(2r): unbounded at 0, supported in r <= 1/2."""
    grid_nodes = grid_nodes or app_config.profiles.grid_nodes

    def func(r: FloatArray) -> FloatArray:
        r = np.asarray(r, dtype=np.float64)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.sqrt(-np.log(r)) * (1.0 - smoothstep(4.0 * r - 1.0))

    def deriv(r: FloatArray) -> FloatArray:
        r = np.asarray(r, dtype=np.float64)
        with np.errstate(divide="ignore", invalid="ignore"):
            s = -np.log(r)
            cut = 1.0 - smoothstep(4.0 * r - 1.0)
            return -cut / (2.0 * r * np.sqrt(s)) - 4.0 * np.sqrt(s) * smoothstep_derivative(
                4.0 * r - 1.0
            )

    return RadialProfile(
        frame=Frame.U_FRAME,
        func=func,
        deriv=deriv,
        nodes=_grid(np.geomspace(1e-12, 0.5, grid_nodes), [0.25]),
        support=(0.0, 0.5),
        breakpoints=(0.25, 0.5),
        core=LogPowerCore(radius=0.25, coefficient=1.0, exponent=0.5),
        family=FamilyName.H0.value,
    )


def random_profile(
    seed: int,
    frame: Frame = Frame.U_FRAME,
    smoothness: Smoothness = Smoothness.PIECEWISE_LINEAR,
    *,
    count: int | None = None,
    inner_radius: float = 1e-3,
    outer_radius: float = 0.95,
    gauge: GaugeTransform | None = None,
) -> RadialProfile:
    """Seeded compactly supported profile in [inner_radius, outer_radius].

    ``count`` is the number of interior knots (piecewise-linear) or bumps
    (sums of (1 - x^2)^3). Positions are log-uniform so that small radii are
    sampled. A w-frame profile is the u-frame profile pushed into ``gauge``.

    Raises
    ------
    DomainError
        If the radii are not ordered inside (0, 1) or a w-frame is requested
        without a gauge.
    """
    if not 0.0 < inner_radius < outer_radius < 1.0:
        raise DomainError(
            f"need 0 < inner_radius < outer_radius < 1, got "
            f"{inner_radius!r}, {outer_radius!r}"
        )
    if frame is Frame.W_FRAME and gauge is None:
        raise DomainError("a w-frame random profile needs a gauge")
    rng = np.random.default_rng(seed)
    log_lo, log_hi = math.log(inner_radius), math.log(outer_radius)
    match smoothness:
        case Smoothness.PIECEWISE_LINEAR:
            count = app_config.profiles.random_knots if count is None else count
            knots = np.sort(np.exp(rng.uniform(log_lo, log_hi, count)))
            heights = rng.uniform(0.0, 1.0, count)
            profile = from_samples(
                np.concatenate([[inner_radius], knots, [outer_radius]]),
                np.concatenate([[0.0], heights, [0.0]]),
                family=FamilyName.RANDOM.value,
            )
        case Smoothness.SMOOTH_BUMP_SUM:
            count = app_config.profiles.random_bumps if count is None else count
            centres = np.exp(rng.uniform(log_lo, log_hi, count))
            reach = np.minimum(centres - inner_radius, outer_radius - centres)
            widths = rng.uniform(0.2, 0.9, count) * reach
            heights = rng.uniform(0.2, 1.0, count)
            profile = _bump_sum(centres, widths, heights, inner_radius, outer_radius)
    profile = replace(
        profile,
        params={
            "seed": seed,
            "count": float(count),
            "inner_radius": inner_radius,
            "outer_radius": outer_radius,
        },
    )
    if frame is Frame.W_FRAME:
        return push(profile, gauge)
    return profile


def _bump_sum(
    centres: FloatArray, widths: FloatArray, heights: FloatArray, lo: float, hi: float
) -> RadialProfile:
    def func(r: FloatArray) -> FloatArray:
        r = np.asarray(r, dtype=np.float64)[..., None]
        x = (r - centres) / widths
        return np.sum(heights * np.clip(1.0 - x**2, 0.0, None) ** 3, axis=-1)

    def deriv(r: FloatArray) -> FloatArray:
        r = np.asarray(r, dtype=np.float64)[..., None]
        x = (r - centres) / widths
        bell = np.clip(1.0 - x**2, 0.0, None)
        return np.sum(-6.0 * heights * x * bell**2 / widths, axis=-1)

    ends = np.concatenate([centres - widths, centres, centres + widths])
    nodes = _grid(np.geomspace(lo, hi, app_config.profiles.grid_nodes), ends)
    return RadialProfile(
        frame=Frame.U_FRAME,
        func=func,
        deriv=deriv,
        nodes=nodes[(nodes >= lo) & (nodes <= hi)],
        support=(lo, hi),
        breakpoints=tuple(float(e) for e in np.sort(ends)),
        family=FamilyName.RANDOM.value,
    )


def bisect_panels(u: RadialProfile) -> RadialProfile:
    """``u`` with the midpoint of every quadrature panel added as a breakpoint.

    Panels are the intervals between consecutive breakpoints of the finite part
    of the support, so the result is integrated on twice as many of them.
    """
    lo, hi = u.support
    inner = [b for b in u.breakpoints if lo < b < hi]
    edges = np.unique([lo, *inner, *([hi] if math.isfinite(hi) else [])])
    mids = 0.5 * (edges[:-1] + edges[1:])
    return replace(
        u,
        nodes=np.union1d(u.nodes, mids),
        breakpoints=tuple(float(b) for b in np.union1d(u.breakpoints, mids)),
    )


__all__: list[str] = [
    "bisect_panels",
    "concentrating_energy_excess",
    "concentrating_family",
    "cutoff_eta",
    "h0_profile",
    "moser_family",
    "plateau_family",
    "random_profile",
    "smoothstep",
    "wkappa_constants",
    "wkappa_family",
    "zeta_t1",
]
