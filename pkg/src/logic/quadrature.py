"""
Energies, deficits, Moser functionals and the Hardy-type B-constant.

Every singular integral over the disk is reduced to one variable and evaluated
in a gauge frame where the substitution removes the singularity. Moser
functionals are evaluated in the log domain so that values far beyond the
double-precision range are representable.
"""

import heapq
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np
from scipy import integrate as sp_integrate
from scipy.special import logsumexp

from src import create_logger
from src.config import app_config
from src.exceptions import DivergentFactor, DomainError, NoConvergence, ZeroDenominator
from src.logic.transforms import (
    GaugeTransform,
    gauge_a,
    gauge_b,
    gauge_c,
    gauge_for,
    pull,
    push,
)
from src.logic.weights import KINK_RADIUS, potential_from_name, r2_potential
from src.schemas import (
    EnergyReport,
    IntegralResult,
    LogIntegral,
    MazyaReport,
    PotentialSpec,
    RatioReport,
)
from src.schemas.profile import RadialProfile
from src.schemas.types import (
    Chart,
    FloatArray,
    Frame,
    GaugeTag,
    MoserConvention,
    PotentialKind,
    RatioFlag,
    RatioVariant,
    RealFunction,
)

logger = create_logger(name="quadrature")

LOG_PI: float = math.log(math.pi)
LN2: float = math.log(2.0)
# Largest number of doublings of a truncation point.
_MAX_DOUBLINGS: int = 40


# ===== One-dimensional integrators =====
def _panel_edges(a: float, b: float, breakpoints: Sequence[float]) -> list[float]:
    inner = sorted({float(x) for x in breakpoints if a < x < b and math.isfinite(x)})
    return [a, *inner] + ([b] if math.isfinite(b) else [])


def _quad_panel(
    f: RealFunction, lo: float, hi: float, tol: float, abs_tol: float, limit: int
) -> tuple[float, float, bool]:
    out = sp_integrate.quad(
        lambda x: float(f(np.asarray(x, dtype=np.float64))),
        lo,
        hi,
        epsabs=abs_tol,
        epsrel=tol,
        limit=limit,
        full_output=1,
    )
    # A fourth element (the warning message) means the panel did not converge.
    return float(out[0]), float(out[1]), len(out) < 4


def integrate(
    f: RealFunction,
    a: float,
    b: float,
    breakpoints: Sequence[float] = (),
    tol: float | None = None,
    decay: Callable[[float], float] | None = None,
    max_depth: int | None = None,
    abs_tol: float = 1e-15,
    raise_on_failure: bool = False,
) -> IntegralResult:
    """Composite adaptive integral of ``f`` over [a, b] with panel edges at ``breakpoints``.

    Parameters
    ----------
    f : RealFunction
        Vectorized integrand, finite between breakpoints.
    a, b : float
        Limits; ``b`` may be ``inf``.
    breakpoints : sequence of float
        Points where ``f`` or a derivative jumps; used as exact panel edges.
    tol : float, optional
        Relative tolerance (default ``quad.tol``).
    decay : callable, optional
        Bound T -> int_T^inf |f| for an infinite ``b``. When given, the range is
        truncated at the first doubling of ``quad.tmax`` where the bound drops
        below ``quad.decay_cutoff`` relative to the running total; otherwise the
        library's infinite-range mapping is used.
    max_depth : int, optional
        Bisection depth; the subinterval limit of each panel is ten times this.
    abs_tol : float
        Absolute tolerance floor per panel.
    raise_on_failure : bool
        Raise NoConvergence instead of returning ``converged=False``.

    Returns
    -------
    IntegralResult
    """
    cfg = app_config.quad
    tol = tol or cfg.tol
    limit = 10 * (max_depth or cfg.max_depth)
    if not a < b:
        return IntegralResult(value=0.0, error=0.0)
    edges = _panel_edges(a, b, breakpoints)
    value, error, converged = 0.0, 0.0, True
    note = None
    for lo, hi in zip(edges, edges[1:]):
        v, e, ok = _quad_panel(f, lo, hi, tol, abs_tol, limit)
        value, error, converged = value + v, error + e, converged and ok
    if math.isinf(b):
        start = edges[-1]
        if decay is not None:
            T = max(start, cfg.tmax)
            v, e, ok = _quad_panel(f, start, T, tol, abs_tol, limit)
            value, error, converged = value + v, error + e, converged and ok
            for _ in range(_MAX_DOUBLINGS):
                bound = decay(T)
                if bound <= cfg.decay_cutoff * max(abs(value), abs_tol):
                    break
                v, e, ok = _quad_panel(f, T, 2.0 * T, tol, abs_tol, limit)
                value, error, converged = value + v, error + e, converged and ok
                T *= 2.0
            bound = decay(T)
            error += bound
            note = f"truncated at T={T!r} with tail bound {bound!r}"
        else:
            v, e, ok = _quad_panel(f, start, math.inf, tol, abs_tol, limit)
            value, error, converged = value + v, error + e, converged and ok
            note = "infinite range mapped to a finite interval"
    result = IntegralResult(value=value, error=error, converged=converged, note=note)
    if not converged:
        logger.warning(f"integral over [{a!r}, {b!r}] missed tol={tol!r}: error={error!r}")
        if raise_on_failure:
            raise NoConvergence(f"integral over [{a!r}, {b!r}] did not converge", result)
    return result


def _log_abs_difference(x: float, y: float) -> float:
    """log |e^x - e^y|."""
    if x == y:
        return -math.inf
    hi, lo = max(x, y), min(x, y)
    return hi + math.log(-math.expm1(lo - hi))


def log_integrate(
    g: RealFunction,
    a: float,
    b: float,
    breakpoints: Sequence[float] = (),
    tol: float | None = None,
    gauss_nodes: int | None = None,
    max_depth: int | None = None,
) -> LogIntegral:
    """log of int_a^b exp(g(t)) dt for a finite range, without forming exp(g).

    Each panel is integrated by Gauss-Legendre in the log domain and compared
    with its two halves; the panel with the largest error is split until the
    combined error is below ``tol`` relative to the total.
    """
    cfg = app_config.quad
    tol = tol or cfg.tol
    max_depth = max_depth or cfg.max_depth
    x_ref, w_ref = np.polynomial.legendre.leggauss(gauss_nodes or cfg.gauss_nodes)
    log_w = np.log(w_ref)
    overflow = False

    def rule(lo: float, hi: float) -> float:
        nonlocal overflow
        x = 0.5 * (hi - lo) * x_ref + 0.5 * (hi + lo)
        with np.errstate(all="ignore"):
            vals = np.asarray(g(x), dtype=np.float64)
        vals = np.where(np.isnan(vals), -np.inf, vals)
        if np.any(vals == np.inf):
            overflow = True
        return float(logsumexp(vals + log_w)) + math.log(0.5 * (hi - lo))

    def panel(lo: float, hi: float, depth: int) -> tuple[float, float, float, float, int]:
        mid = 0.5 * (lo + hi)
        coarse = rule(lo, hi)
        fine = float(np.logaddexp(rule(lo, mid), rule(mid, hi)))
        return (-_log_abs_difference(coarse, fine), lo, hi, fine, depth)

    edges = _panel_edges(a, b, breakpoints)
    if not math.isfinite(b):
        raise DomainError("log_integrate needs a finite upper limit")
    heap = [panel(lo, hi, 0) for lo, hi in zip(edges, edges[1:]) if hi > lo]
    heapq.heapify(heap)
    frozen: list[tuple[float, float, float, float, int]] = []
    converged = False
    for _ in range(100 * max_depth):
        if overflow:
            break
        entries = heap + frozen
        total = float(logsumexp([e[3] for e in entries]))
        err = float(logsumexp([-e[0] for e in entries]))
        if total == -math.inf or err - total <= math.log(tol):
            converged = True
            break
        if not heap:
            break
        worst = heapq.heappop(heap)
        _, lo, hi, _, depth = worst
        if depth >= max_depth:
            frozen.append(worst)
            continue
        mid = 0.5 * (lo + hi)
        heapq.heappush(heap, panel(lo, mid, depth + 1))
        heapq.heappush(heap, panel(mid, hi, depth + 1))
    if overflow:
        return LogIntegral(
            log_value=math.inf, abs_error=math.inf, overflow=True, note="exponent overflow"
        )
    entries = sorted(heap + frozen, key=lambda e: e[1])
    total = float(logsumexp([e[3] for e in entries]))
    err = float(logsumexp([-e[0] for e in entries]))
    rel = 0.0 if total == -math.inf else math.exp(min(err - total, 700.0))
    note = None if converged else f"relative error {rel!r} above tol={tol!r}"
    if not converged:
        logger.warning(f"log-domain integral over [{a!r}, {b!r}]: {note}")
    return LogIntegral(log_value=total, abs_error=rel, overflow=False, note=note)


# ===== Frames =====
def _as_u_frame(u: RadialProfile) -> RadialProfile:
    return u if u.frame is Frame.U_FRAME else pull(u)


def _plain_frame(u: RadialProfile) -> RadialProfile:
    """The profile as a function of t = -2 ln r (GaugeB at mu = 0)."""
    if u.frame is Frame.W_FRAME:
        gauge = u.gauge
        assert gauge is not None
        if gauge.is_log_frame and gauge.omega_exponent == 0.0 and gauge.alpha == 0.0:
            return u
    return push(_as_u_frame(u), gauge_b(0.0))


def _compatible(gauge: GaugeTransform, mu: float) -> bool:
    if gauge.tag is GaugeTag.IDENTITY or not gauge.accepts(mu):
        return False
    return gauge.tag is GaugeTag.GAUGE_C or gauge.alpha == 0.0


def energy_frame(u: RadialProfile, mu: float) -> tuple[RadialProfile, bool]:
    """A w-frame copy of ``u`` whose gauge diagonalizes the mu-deficit.

    Returns the profile and whether its gauge form equals the mu-deficit. When
    the support touches an endpoint where the automatic gauge vanishes, the
    plain frame t = -2 ln r is returned instead with ``False``.
    """
    if u.frame is Frame.W_FRAME:
        assert u.gauge is not None
        if _compatible(u.gauge, mu):
            return u, True
    base = _as_u_frame(u)
    try:
        return push(base, gauge_for(mu)), True
    except DomainError:
        logger.debug(f"support of {u.family!r} touches a gauge zero; using the plain frame")
        return push(base, gauge_b(0.0)), False


def _kink_breakpoint(gauge: GaugeTransform) -> float:
    return float(gauge.forward(np.asarray(KINK_RADIUS)))


def _breakpoints(w: RadialProfile) -> list[float]:
    assert w.gauge is not None
    points = [*w.breakpoints, _kink_breakpoint(w.gauge)]
    if w.plateau is not None:
        points.append(w.plateau[0])
    return points


# ===== Quadratic functionals =====
def gauge_energy(w: RadialProfile, tol: float | None = None) -> float:
    """int energy_weight(t) w'(t)^2 dt: the gauge-frame form of the deficit."""
    gauge = w.gauge
    if gauge is None:
        raise DomainError("gauge_energy expects a w-frame profile")
    lo, end = w.support[0], w.energy_end
    if not math.isfinite(end):
        raise DomainError("gauge_energy needs a plateau or a bounded support")

    def density(t: FloatArray) -> FloatArray:
        return gauge.energy_weight(t) * np.asarray(w.derivative(t)) ** 2

    return integrate(density, lo, end, _breakpoints(w), tol=tol).value


def j_functional(w: RadialProfile, tol: float | None = None) -> float:
    """(1 - 2 tau0)^-1 int_2^inf w'(t)^2 t^(2 tau0) dt in the GaugeA(alpha = 1) frame."""
    gauge = w.gauge
    if gauge is None or gauge.tag is not GaugeTag.GAUGE_A:
        raise DomainError("j_functional expects a GaugeA profile")
    tau0 = gauge.tau0

    def density(t: FloatArray) -> FloatArray:
        return np.asarray(w.derivative(t)) ** 2 * t ** (2.0 * tau0)

    value = integrate(density, 2.0, w.energy_end, w.breakpoints, tol=tol).value
    return value / (1.0 - 2.0 * tau0)


def plain_deficit(
    u: RadialProfile, mu: float, alpha: float = 0.0, tol: float | None = None
) -> float:
    """int |grad u|^2 + mu u^2 / (r^2 (alpha - ln r)^2) dx, in the frame t = -2 ln r."""
    w = _plain_frame(u)

    def density(t: FloatArray) -> FloatArray:
        value, slope = np.asarray(w(t)), np.asarray(w.derivative(t))
        return 4.0 * math.pi * slope**2 + mu * math.pi * value**2 / (alpha + t / 2.0) ** 2

    lo, hi = w.support
    if mu == 0.0:
        hi = w.energy_end
    return integrate(density, lo, hi, _breakpoints(w), tol=tol).value


def _plateau_tails(
    gauge: GaugeTransform, start: float, value: float, potential: PotentialSpec | None
) -> tuple[float, float]:
    """Dirichlet and potential integrals of u = omega * value over t >= start."""
    exponent = gauge.omega_exponent
    if value == 0.0:
        return 0.0, 0.0
    if exponent >= 0.5:
        return math.inf, math.inf
    lam = float(gauge.log_variable(np.asarray(start)))
    scale = 2.0 * math.pi * value**2 * lam ** (2.0 * exponent - 1.0) / (1.0 - 2.0 * exponent)
    dirichlet = exponent**2 * scale
    if potential is None:
        return dirichlet, scale

    def density(t: FloatArray) -> FloatArray:
        s = gauge.s_of_t(t)
        w = np.full_like(np.asarray(t, dtype=np.float64), value)
        return gauge.potential_density(t, w, r2_potential(potential, s))

    return dirichlet, integrate(density, start, math.inf).value


def deficit(
    u: RadialProfile,
    mu: float,
    potential: PotentialSpec | None = None,
    tol: float | None = None,
) -> EnergyReport:
    """Dirichlet energy, potential term and mu-deficit of ``u``.

    The integrals run in the gauge frame chosen by ``energy_frame``. The deficit
    is ``dirichlet + mu * potential_term`` when both are finite and otherwise the
    gauge form, which stays finite for profiles in the kernel direction such
    as h0.
    """
    if potential is not None and potential.kind is PotentialKind.LERAY_NORMALIZED:
        potential = None if potential.scale == 1.0 else potential
    w, exact_form = energy_frame(u, mu)
    gauge = w.gauge
    assert gauge is not None
    lo, hi = w.support
    end = w.energy_end
    points = _breakpoints(w)

    def values(t: FloatArray) -> tuple[FloatArray, FloatArray]:
        return np.asarray(w(t)), np.asarray(w.derivative(t))

    def dirichlet_density(t: FloatArray) -> FloatArray:
        return gauge.dirichlet_density(t, *values(t))

    def potential_density(t: FloatArray) -> FloatArray:
        value = np.asarray(w(t))
        if potential is None:
            return gauge.leray_density(t, value)
        return gauge.potential_density(t, value, r2_potential(potential, gauge.s_of_t(t)))

    d = integrate(dirichlet_density, lo, end, points, tol=tol)
    v = integrate(potential_density, lo, end, points, tol=tol)
    dirichlet, pot = d.value, v.value
    note = None
    if w.plateau is not None and math.isinf(hi):
        tail_d, tail_v = _plateau_tails(gauge, w.plateau[0], w.plateau[1], potential)
        dirichlet, pot = dirichlet + tail_d, pot + tail_v
        if math.isinf(tail_d):
            note = "dirichlet and potential integrals diverge; deficit from the gauge form"
    error = d.error + v.error
    if exact_form:
        form = integrate(
            lambda t: gauge.energy_weight(t) * values(t)[1] ** 2, lo, end, points, tol=tol
        )
        gauge_value, error = form.value, error + form.error
        if potential is not None and mu != 0.0:
            gauge_value += mu * _potential_excess(w, potential, tol)
    else:
        gauge_value = dirichlet + mu * pot
    if math.isfinite(dirichlet) and math.isfinite(pot):
        value = dirichlet + mu * pot
    else:
        value = gauge_value
    return EnergyReport(
        mu=float(mu),
        dirichlet=float(dirichlet),
        potential_term=float(pot),
        deficit=float(value),
        gauge_deficit=float(gauge_value),
        abs_error_estimate=float(error),
        truncation_note=note,
    )


def _potential_excess(w: RadialProfile, potential: PotentialSpec, tol: float | None) -> float:
    """int (V - V_Leray) u^2 dx."""
    gauge = w.gauge
    assert gauge is not None

    def density(t: FloatArray) -> FloatArray:
        s = gauge.s_of_t(t)
        with np.errstate(divide="ignore"):
            diff = r2_potential(potential, s) - 1.0 / s**2
        return gauge.potential_density(t, np.asarray(w(t)), np.abs(diff)) * np.sign(diff)

    lo, hi = w.support
    return integrate(density, lo, hi, _breakpoints(w), tol=tol).value


def truncated_dirichlet(u: RadialProfile, eps: float, tol: float | None = None) -> float:
    """2 pi int_eps^1 u'(r)^2 r dr, evaluated as 4 pi int u_t^2 dt up to t = -2 ln eps."""
    if not 0.0 < eps < 1.0:
        raise DomainError(f"eps must lie in (0, 1), got eps={eps!r}")
    w = _plain_frame(u)
    lo = w.support[0]
    hi = min(w.support[1], -2.0 * math.log(eps))

    def density(t: FloatArray) -> FloatArray:
        return 4.0 * math.pi * np.asarray(w.derivative(t)) ** 2

    return integrate(density, lo, hi, _breakpoints(w), tol=tol).value


def truncated_deficit(
    u: RadialProfile, mu: float, eps: float, tol: float | None = None
) -> float:
    """Deficit over the annulus eps < r < 1 with a single combined integrand."""
    if not 0.0 < eps < 1.0:
        raise DomainError(f"eps must lie in (0, 1), got eps={eps!r}")
    w = _plain_frame(u)
    lo = w.support[0]
    hi = min(w.support[1], -2.0 * math.log(eps))

    def density(t: FloatArray) -> FloatArray:
        value, slope = np.asarray(w(t)), np.asarray(w.derivative(t))
        return 4.0 * math.pi * slope**2 + mu * math.pi * value**2 / (t / 2.0) ** 2

    return integrate(density, lo, hi, _breakpoints(w), tol=tol).value


# ===== Moser functionals =====
def _moser_exponent(
    w: RadialProfile, alpha: float, p: float, convention: MoserConvention
) -> RealFunction:
    """t -> alpha |u|^p + log(area element), in factored form for GaugeC."""
    gauge = w.gauge
    assert gauge is not None
    log_alpha = math.log(alpha)

    def g(t: FloatArray) -> FloatArray:
        t = np.asarray(t, dtype=np.float64)
        with np.errstate(all="ignore"):
            log_w = np.log(np.abs(np.asarray(w(t), dtype=np.float64)))
            match gauge.tag:
                case GaugeTag.GAUGE_C:
                    power = 0.5 * p if convention is MoserConvention.EXACT else p
                    log_s = t + np.log(-np.expm1(-t)) - LN2
                    log_a = log_alpha + p * log_w + power * log_s
                    bracket = np.exp(log_a - t) + np.expm1(-t)
                    out = LOG_PI + t + np.exp(t) * bracket
                    return np.where(bracket == 0.0, LOG_PI + t, out)
                case GaugeTag.IDENTITY:
                    return alpha * np.exp(p * log_w) + np.log(2.0 * math.pi * t)
                case _:
                    lam = gauge.log_variable(t)
                    log_a = log_alpha + p * (gauge.tau0 * np.log(lam) + log_w)
                    return np.exp(log_a) + gauge.log_area_element(t)

    return g


def _tail_cut(
    g: RealFunction, lo: float, start: float, samples: FloatArray
) -> tuple[float, float] | None:
    """Truncation point T and log of a bound on int_T^inf exp(g), or None if g never decays."""
    with np.errstate(all="ignore"):
        gmax = float(np.nanmax(g(samples))) if samples.size else -math.inf
    T = max(start, lo + 1.0, app_config.quad.tmax)
    for _ in range(_MAX_DOUBLINGS):
        with np.errstate(all="ignore"):
            g_T = float(g(np.asarray(T)))
            h = 1e-4 * max(1.0, T)
            slope = (float(g(np.asarray(T + h))) - g_T) / h
        if g_T == math.inf:
            return None
        if g_T == -math.inf:
            return T, -math.inf
        gmax = max(gmax, g_T)
        if g_T < gmax - 60.0 and slope < -0.5:
            return T, g_T - math.log(min(abs(slope), 1.0))
        T *= 2.0
    return None


def moser_log(
    u: RadialProfile,
    alpha: float,
    p: float = 2.0,
    convention: MoserConvention = MoserConvention.EXACT,
    tol: float | None = None,
) -> LogIntegral:
    """ln int_{B_1} exp(alpha |u|^p) dx.

    u-frame profiles are evaluated in the frame t = -2 ln r. The region of the
    disk outside the support contributes its area. For the GaugeC frame the
    ``convention`` chooses |u|^p = s^(p/2) |w|^p (EXACT) or s^p |w|^p
    (GAUGE_POWER), s = (e^t - 1) / 2.

    Raises
    ------
    DomainError
        If ``alpha`` or ``p`` is not positive.
    """
    if not (alpha > 0 and p > 0):
        raise DomainError(f"alpha and p must be positive, got alpha={alpha!r}, p={p!r}")
    w = _plain_frame(u) if u.frame is Frame.U_FRAME else u
    gauge = w.gauge
    assert gauge is not None
    g = _moser_exponent(w, alpha, p, convention)
    lo, hi = w.support
    points = _breakpoints(w)
    note = None
    tail = -math.inf
    if math.isinf(hi):
        start = max([lo, *(x for x in points if math.isfinite(x))])
        samples = w.nodes[(w.nodes >= lo)]
        cut = _tail_cut(g, lo, start, samples)
        if cut is None:
            logger.info(f"Moser integrand of {w.family!r} does not decay: alpha={alpha!r}, p={p!r}")
            return LogIntegral(
                log_value=math.inf,
                abs_error=math.inf,
                overflow=True,
                note="integrand does not decay; the integral diverges",
            )
        hi, tail = cut
        note = f"truncated at T={hi!r}"
    body = log_integrate(g, lo, hi, points, tol=tol)
    if body.overflow:
        return body
    log_value = float(np.logaddexp(body.log_value, tail))
    abs_error = body.abs_error + (
        0.0 if tail == -math.inf else math.exp(min(tail - log_value, 0.0))
    )
    complement = math.pi - gauge.area_between(lo, w.support[1])
    if complement > 0.0:
        log_value = float(np.logaddexp(log_value, math.log(complement)))
    return LogIntegral(
        log_value=log_value,
        abs_error=abs_error,
        overflow=False,
        note=note or body.note,
    )


def moser_direct(
    u: RadialProfile,
    alpha: float,
    p: float = 2.0,
    convention: MoserConvention = MoserConvention.EXACT,
    tol: float | None = None,
) -> IntegralResult:
    """int_{B_1} exp(alpha |u|^p) dx by plain quadrature of exp(g); overflows to inf."""
    w = _plain_frame(u) if u.frame is Frame.U_FRAME else u
    gauge = w.gauge
    assert gauge is not None
    g = _moser_exponent(w, alpha, p, convention)

    def f(t: FloatArray) -> FloatArray:
        with np.errstate(all="ignore"):
            return np.exp(g(t))

    lo, hi = w.support
    points = _breakpoints(w)
    tail = 0.0
    if math.isinf(hi):
        start = max([lo, *(x for x in points if math.isfinite(x))])
        cut = _tail_cut(g, lo, start, w.nodes[w.nodes >= lo])
        if cut is None:
            return IntegralResult(value=math.inf, error=math.inf, converged=False)
        hi, log_tail = cut
        tail = math.exp(log_tail) if log_tail < 700.0 else math.inf
    body = integrate(f, lo, hi, points, tol=tol)
    complement = max(math.pi - gauge.area_between(lo, w.support[1]), 0.0)
    return IntegralResult(
        value=body.value + tail + complement,
        error=body.error + tail,
        converged=body.converged,
        note=body.note,
    )


def moser(
    u: RadialProfile,
    alpha: float,
    p: float = 2.0,
    potential: PotentialSpec | None = None,
    mu: float = 0.0,
    convention: MoserConvention = MoserConvention.EXACT,
    tol: float | None = None,
) -> EnergyReport:
    """Deficit report of ``u`` together with its Moser functional."""
    report = deficit(u, mu, potential, tol)
    log_int = moser_log(u, alpha, p, convention, tol)
    notes = [n for n in (report.truncation_note, log_int.note) if n]
    return report.model_copy(
        update={
            "moser_log": log_int.log_value,
            "overflow": log_int.overflow,
            "abs_error_estimate": report.abs_error_estimate + log_int.abs_error,
            "truncation_note": "; ".join(notes) or None,
        }
    )


# ===== Measure pairs and the B-constant =====
@dataclass(frozen=True)
class MeasurePair:
    """Densities of a measure pair written in a chart coordinate y.

    ``gamma_density`` is the density of gamma and ``inner_density`` that of
    (d nu* / ds)^(-1/(p - 1)), both with respect to y, supported on
    [y_min, y_max]. For the LOG and LOGLOG charts y increases as s decreases,
    so gamma((0, s)) is the integral of gamma_density from y to y_max.
    ``gamma_mass``, when given, is that mass in closed form.
    """

    chart: Chart
    gamma_density: RealFunction
    inner_density: RealFunction
    p: float
    q: float
    y_min: float = 0.0
    y_max: float = math.inf
    label: str = ""
    gamma_mass: Callable[[float], float] | None = None

    def __post_init__(self) -> None:
        if not 1.0 < self.p <= self.q:
            raise DomainError(f"need 1 < p <= q, got p={self.p!r}, q={self.q!r}")

    def radius(self, y: float) -> float:
        """The variable s of the measures at chart coordinate y."""
        match self.chart:
            case Chart.LOG:
                return math.exp(-y)
            case Chart.LOGLOG:
                return math.exp(-math.exp(y)) if y < 700.0 else 0.0
            case _:
                return y


def small_radius_pair(beta: float = 1.0, q: float = 2.0) -> MeasurePair:
    """Pair for the weighted inequality on (0, e^-e]: y = ln ln(1/s) >= 1.

    Gamma has density 1 / (beta y^(q/2 + 1)) and the inner density is 1, so
    B(y) = (2 / (beta q))^(1/q) sqrt((y - 1) / y).
    """
    if beta <= 0 or q < 2:
        raise DomainError(f"need beta > 0 and q >= 2, got beta={beta!r}, q={q!r}")
    return MeasurePair(
        chart=Chart.LOGLOG,
        gamma_density=lambda y: 1.0 / (beta * np.asarray(y) ** (q / 2.0 + 1.0)),
        inner_density=lambda y: np.ones_like(np.asarray(y, dtype=np.float64)),
        p=2.0,
        q=q,
        y_min=1.0,
        label=f"small-radius(beta={beta!r}, q={q!r})",
        gamma_mass=lambda y: 2.0 / (beta * q) * y ** (-q / 2.0),
    )


def boundary_pair(beta: float = 1.0, q: float = 2.0) -> MeasurePair:
    """Pair for the weighted inequality near r = 1 in s = 1 - r: y = -ln s.

    Supported on y >= -ln(1 - e^-e), where B(y) = (2 / (beta q))^(1/q)
    sqrt((y - y0) / y).
    """
    if beta <= 0 or q < 2:
        raise DomainError(f"need beta > 0 and q >= 2, got beta={beta!r}, q={q!r}")
    y0 = -math.log1p(-math.exp(-math.e))
    return MeasurePair(
        chart=Chart.LOG,
        gamma_density=lambda y: 1.0 / (beta * np.asarray(y) ** (q / 2.0 + 1.0)),
        inner_density=lambda y: np.ones_like(np.asarray(y, dtype=np.float64)),
        p=2.0,
        q=q,
        y_min=y0,
        label=f"boundary(beta={beta!r}, q={q!r})",
        gamma_mass=lambda y: 2.0 / (beta * q) * y ** (-q / 2.0),
    )


def pair_from_densities(
    gamma_density: RealFunction,
    nu_density: RealFunction,
    p: float,
    q: float,
    support: tuple[float, float] = (0.0, math.inf),
) -> MeasurePair:
    """Pair given by plain densities of gamma and nu* in s."""

    def inner(s: FloatArray) -> FloatArray:
        with np.errstate(divide="ignore"):
            return np.asarray(nu_density(s), dtype=np.float64) ** (-1.0 / (p - 1.0))

    return MeasurePair(
        chart=Chart.IDENTITY,
        gamma_density=gamma_density,
        inner_density=inner,
        p=p,
        q=q,
        y_min=support[0],
        y_max=support[1],
        label="densities",
    )


def mazya_B(pair: MeasurePair, grid: Sequence[float], tol: float | None = None) -> MazyaReport:
    """sup over ``grid`` of gamma((0, s))^(1/q) * (int_s^inf (d nu*/ds)^(-1/(p-1)))^((p-1)/p).

    Raises
    ------
    DivergentFactor
        If the inner factor diverges at every grid point.
    NoConvergence
        If a quadrature of the gamma mass misses its tolerance.
    """
    increasing = pair.chart is Chart.IDENTITY
    factors: list[float] = []
    finite_inner = False
    for y in grid:
        y = float(min(max(y, pair.y_min), pair.y_max))
        if increasing:
            inner = integrate(pair.inner_density, y, pair.y_max, tol=tol)
        else:
            inner = integrate(pair.inner_density, pair.y_min, y, tol=tol)
        if not (inner.converged and math.isfinite(inner.value)):
            factors.append(math.inf)
            continue
        finite_inner = True
        if pair.gamma_mass is not None:
            mass = float(pair.gamma_mass(y))
        else:
            lo, hi = (pair.y_min, y) if increasing else (y, pair.y_max)
            gamma = integrate(pair.gamma_density, lo, hi, tol=tol)
            if not gamma.converged:
                raise NoConvergence(
                    f"gamma mass of {pair.label!r} at y={y!r} missed its tolerance "
                    f"(value {gamma.value!r}, error {gamma.error!r})",
                    result=gamma,
                )
            mass = gamma.value
        # Converged masses of nonnegative densities are negative only in roundoff.
        factors.append(
            max(mass, 0.0) ** (1.0 / pair.q) * max(inner.value, 0.0) ** ((pair.p - 1.0) / pair.p)
        )
    if not finite_inner:
        raise DivergentFactor(f"inner factor of {pair.label!r} diverges on the whole grid")
    finite = [f if math.isfinite(f) else -math.inf for f in factors]
    k = int(np.argmax(finite))
    value = factors[k]
    upper = value * (pair.q / (pair.q - 1.0)) ** ((pair.p - 1.0) / pair.p) * pair.q ** (
        1.0 / pair.q
    )
    logger.debug(f"B-constant of {pair.label!r}: {value!r} at y={grid[k]!r}")
    return MazyaReport(
        value=float(value),
        argmax=float(grid[k]),
        argmax_radius=pair.radius(float(grid[k])),
        upper_bound=float(upper),
        p=pair.p,
        q=pair.q,
        factors=tuple(float(f) for f in factors),
    )


# ===== Improved inequalities =====
def _weighted_moment(
    w: RadialProfile, r2_weight: RealFunction, power: float, tol: float | None
) -> float:
    """pi int |u|^power r^2 W dt in the plain frame, with r^2 W given in s."""

    def density(t: FloatArray) -> FloatArray:
        value = np.abs(np.asarray(w(t)))
        return math.pi * value**power * r2_weight(t / 2.0)

    lo, hi = w.support
    return integrate(density, lo, hi, _breakpoints(w), tol=tol).value


def remainder_ratio(
    u: RadialProfile,
    variant: RatioVariant,
    *,
    q: float = 4.0,
    K: int = 5,
    tol: float | None = None,
) -> RatioReport:
    """LHS / RHS of an improved Hardy-type inequality for a compactly supported u.

    - REMAINDER_L2: Leray deficit over int u^2 W_2 dx.
    - REMAINDER_LQ, REMAINDER_LQ_BALL: Leray deficit over (int |u|^q W_q dx)^(2/q);
      the ball variant requires support in r <= 1/e.
    - ITERATED_LOG: deficit with the shifted Leray potential over the
      iterated-log series weight (which already carries the factor 1/4).
    - LOG_GRADIENT: int |grad u|^2 ln(1/r) dx over int u^2 / (r^2 ln(1/r)
      (1 + |ln ln(1/r)|)^2) dx.

    Raises
    ------
    ZeroDenominator
        If u vanishes identically.
    DomainError
        If the support violates the variant's domain.
    """
    base = _as_u_frame(u)
    if not np.any(base.values != 0.0):
        raise ZeroDenominator(f"profile {u.family!r} vanishes identically")
    lo, hi = base.support
    if variant is RatioVariant.REMAINDER_LQ_BALL and hi > KINK_RADIUS:
        raise DomainError(f"support must lie in r <= 1/e, got r <= {hi!r}")
    plain = _plain_frame(base)
    match variant:
        case RatioVariant.REMAINDER_L2 | RatioVariant.REMAINDER_LQ | RatioVariant.REMAINDER_LQ_BALL:
            lhs = gauge_energy(push(base, gauge_c()), tol)
        case RatioVariant.ITERATED_LOG:
            lhs = gauge_energy(push(base, gauge_a(1.0, -0.25)), tol)
        case RatioVariant.LOG_GRADIENT:
            lhs = integrate(
                lambda t: 2.0 * math.pi * t * np.asarray(plain.derivative(t)) ** 2,
                plain.support[0],
                plain.energy_end,
                _breakpoints(plain),
                tol=tol,
            ).value
    match variant:
        case RatioVariant.REMAINDER_L2:
            spec = potential_from_name("rem2")
            rhs = _weighted_moment(plain, lambda s: r2_potential(spec, s), 2.0, tol)
        case RatioVariant.REMAINDER_LQ | RatioVariant.REMAINDER_LQ_BALL:
            spec = PotentialSpec(kind=PotentialKind.REMAINDER_Q, q=float(q))
            moment = _weighted_moment(plain, lambda s: r2_potential(spec, s), q, tol)
            rhs = moment ** (2.0 / q)
        case RatioVariant.ITERATED_LOG:
            spec = PotentialSpec(kind=PotentialKind.ITERATED_LOG_SERIES, K=int(K))
            rhs = _weighted_moment(plain, lambda s: r2_potential(spec, s), 2.0, tol)
        case RatioVariant.LOG_GRADIENT:
            rhs = _weighted_moment(
                plain, lambda s: 1.0 / (s * (1.0 + np.abs(np.log(s))) ** 2), 2.0, tol
            )
    if rhs <= 1e-30 * max(abs(lhs), 1e-300):
        logger.warning(f"near-zero right side for {variant.value!r}: rhs={rhs!r}")
        return RatioReport(
            variant=variant,
            ratio=math.inf,
            lhs=float(lhs),
            rhs=float(rhs),
            flag=RatioFlag.NEAR_ZERO_DENOMINATOR,
        )
    return RatioReport(variant=variant, ratio=float(lhs / rhs), lhs=float(lhs), rhs=float(rhs))


__all__: list[str] = [
    "MeasurePair",
    "boundary_pair",
    "deficit",
    "energy_frame",
    "gauge_energy",
    "integrate",
    "j_functional",
    "log_integrate",
    "mazya_B",
    "moser",
    "moser_direct",
    "moser_log",
    "pair_from_densities",
    "plain_deficit",
    "remainder_ratio",
    "small_radius_pair",
    "truncated_deficit",
    "truncated_dirichlet",
]
