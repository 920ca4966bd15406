"""
Symmetric decreasing rearrangement of radial profiles, the comparison
inequalities it satisfies, flat-extension envelopes of the q-remainder weight
and the angular Fourier decomposition of functions on the disk.
"""

import math
import warnings
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
from scipy.fft import rfft
from scipy.optimize import brentq

from src import create_logger
from src.config import app_config
from src.exceptions import (
    AliasWarning,
    DomainError,
    MonotonicityViolation,
    NegativeInput,
    NoHatR,
)
from src.logic.quadrature import integrate
from src.logic.transforms import pull
from src.logic.weights import KINK_RADIUS, eval_potential, is_nonincreasing, r2_potential
from src.schemas import InequalityCheck, ModeEnergyReport, PolyaSzegoReport, PotentialSpec
from src.schemas.profile import RadialProfile
from src.schemas.types import FloatArray, Frame, HatChoice, PotentialKind

logger = create_logger(name="symmetry")

type PolarFunction = Callable[[FloatArray, FloatArray], FloatArray]

# Levels per block of the vectorized distribution function.
_LEVEL_CHUNK: int = 256

# Sample values closer than this (relative to the maximum) are one level.
_LEVEL_MERGE: float = 1e-12

_CELL_X, _CELL_W = np.polynomial.legendre.leggauss(8)
_CELL_POINTS: FloatArray = 0.5 * (_CELL_X + 1.0)
_CELL_WEIGHTS: FloatArray = 0.5 * _CELL_W


# ===== Distribution function =====
def _u_frame(u: RadialProfile) -> RadialProfile:
    return u if u.frame is Frame.U_FRAME else pull(u)


def _sample_grid(u: RadialProfile, nodes: int | None = None) -> FloatArray:
    """Uniform grid on [0, R] merged with the nodes and breakpoints of ``u``."""
    R = u.support[1]
    uniform = np.linspace(0.0, R, nodes or app_config.symmetry.radial_nodes)
    extra = np.concatenate([u.nodes, u.breakpoints, [u.support[0]]])
    return np.union1d(uniform, extra[(extra >= 0.0) & (extra <= R)])


def _segment_areas(
    r: FloatArray, v: FloatArray, levels: FloatArray, strict: bool = True
) -> FloatArray:
    """Area of {v > level} (or {v >= level}) for the interpolant of (r, v), per level."""
    levels = np.asarray(levels, dtype=np.float64)
    v0, v1 = v[:-1][None, :], v[1:][None, :]
    r0, h = r[:-1][None, :], np.diff(r)[None, :]
    flat = v0 == v1
    rising = v1 > v0
    out = np.empty(levels.size)
    for start in range(0, levels.size, _LEVEL_CHUNK):
        lam = levels[start : start + _LEVEL_CHUNK, None]
        with np.errstate(divide="ignore", invalid="ignore"):
            x = np.clip((lam - v0) / (v1 - v0), 0.0, 1.0)
        above = (v0 > lam) if strict else (v0 >= lam)
        a = np.where(flat | ~rising, 0.0, x)
        b = np.where(flat, np.where(above, 1.0, 0.0), np.where(rising, 1.0, x))
        area = math.pi * ((r0 + b * h) ** 2 - (r0 + a * h) ** 2)
        out[start : start + _LEVEL_CHUNK] = area.sum(axis=1)
    return out


def distribution_function(u: RadialProfile, level: float | FloatArray) -> float | FloatArray:
    """Area of {x in B_1 : u(|x|) > level}.

    Crossings of ``level`` between sample nodes are located by root finding on
    the profile itself.
    """
    u = _u_frame(u)
    r = _sample_grid(u, nodes=min(app_config.symmetry.radial_nodes, 4001))
    v = np.asarray(u(r), dtype=np.float64)
    levels = np.atleast_1d(np.asarray(level, dtype=np.float64))
    out = np.empty(levels.size)
    for i, lam in enumerate(levels):
        above = v > lam
        area = 0.0
        # Exact interval ends: either a node or a root of u - lam.
        edges = np.flatnonzero(np.diff(above.astype(np.int8)))
        starts, ends = [], []
        if above[0]:
            starts.append(r[0])
        for k in edges:
            root = brentq(lambda x: float(u(x)) - lam, r[k], r[k + 1], xtol=1e-15)
            (starts if above[k + 1] else ends).append(root)
        if above[-1]:
            ends.append(r[-1])
        for a, b in zip(starts, ends):
            area += math.pi * (b * b - a * a)
        out[i] = area
    return float(out[0]) if np.ndim(level) == 0 else out


# ===== Rearrangement =====
def merge_levels(v: FloatArray, tol: float) -> FloatArray:
    """Snap sample values to the lowest value of their cluster.

    Values are scanned upward; a value within ``tol`` of the current cluster
    start joins that cluster, so each cluster spans at most ``tol`` and 0
    stays exactly 0.
    """
    values, inverse = np.unique(np.asarray(v, dtype=np.float64), return_inverse=True)
    rep = values.copy()
    for k in range(1, values.size):
        if values[k] - rep[k - 1] <= tol:
            rep[k] = rep[k - 1]
    return rep[np.ravel(inverse)].reshape(np.shape(v))


def rearrange(u: RadialProfile, nodes: int | None = None) -> RadialProfile:
    """Symmetric decreasing rearrangement u* of a nonnegative radial profile.

    ``u`` is replaced by its piecewise-linear interpolant on a fine grid of
    [0, R], R the outer end of the support. The distribution function of the
    interpolant is exactly quadratic between consecutive sample values, so u*
    is evaluated by inverting it in closed form.

    Raises
    ------
    NegativeInput
        If ``u`` takes negative values.
    """
    u = _u_frame(u)
    r = _sample_grid(u, nodes)
    v = np.asarray(u(r), dtype=np.float64)
    if np.any(v < 0.0):
        raise NegativeInput(f"profile {u.family!r} takes negative values; pass |u|")
    v = merge_levels(v, _LEVEL_MERGE * float(v.max(initial=0.0)))
    levels = np.unique(v)[::-1]
    strict = _segment_areas(r, v, levels, strict=True)
    closed = _segment_areas(r, v, levels, strict=False)
    mids = 0.5 * (levels[:-1] + levels[1:])
    middle = _segment_areas(r, v, mids, strict=True)
    # Nondecreasing: S_0 <= G_0 <= S_1 <= G_1 <= ...
    closed = np.maximum.accumulate(np.maximum(closed, strict))
    strict = np.maximum(strict, np.concatenate([[0.0], closed[:-1]]))
    knots = np.ravel(np.column_stack([strict, closed]))
    d_total = strict[1:] - closed[:-1]
    d_mid = middle - closed[:-1]
    c2 = 2.0 * d_total - 4.0 * d_mid
    c1 = d_total - c2
    gaps = levels[:-1] - levels[1:]
    outer = math.sqrt(closed[-1] / math.pi) if levels[-1] > 0.0 else math.sqrt(strict[-1] / math.pi)

    def locate(rho: FloatArray) -> tuple[FloatArray, FloatArray, FloatArray]:
        area = math.pi * np.asarray(rho, dtype=np.float64) ** 2
        idx = np.searchsorted(knots, area, side="right") - 1
        idx = np.clip(idx, 0, knots.size - 1)
        j = np.minimum(idx // 2, max(levels.size - 2, 0))
        if levels.size < 2:
            return area, idx, np.zeros_like(area)
        d = area - closed[j]
        a, b = c2[j], c1[j]
        with np.errstate(divide="ignore", invalid="ignore"):
            disc = np.sqrt(np.maximum(b * b + 4.0 * a * d, 0.0))
            x = np.where(np.abs(a) > 1e-14 * np.abs(b), 2.0 * d / (b + disc), d / b)
        return area, idx, np.clip(np.nan_to_num(x), 0.0, 1.0)

    def func(rho: FloatArray) -> FloatArray:
        area, idx, x = locate(rho)
        j = idx // 2
        if levels.size < 2:
            return np.where(area < knots[-1], levels[0], 0.0)
        inner = np.minimum(j, levels.size - 2)
        sloped = levels[inner] - x * gaps[inner]
        out = np.where(idx % 2 == 0, levels[np.minimum(j, levels.size - 1)], sloped)
        return np.where(area >= knots[-1], 0.0, out)

    def deriv(rho: FloatArray) -> FloatArray:
        rho = np.asarray(rho, dtype=np.float64)
        area, idx, x = locate(rho)
        if levels.size < 2:
            return np.zeros_like(area)
        j = np.minimum(idx // 2, levels.size - 2)
        with np.errstate(divide="ignore", invalid="ignore"):
            slope = -2.0 * math.pi * rho * gaps[j] / (c1[j] + 2.0 * c2[j] * x)
            # Chord of the cell where the local area derivative vanishes in roundoff.
            chord = -gaps[j] / (np.sqrt(strict[j + 1] / math.pi) - np.sqrt(closed[j] / math.pi))
        slope = np.where(np.isfinite(slope), slope, np.where(np.isfinite(chord), chord, 0.0))
        return np.where((idx % 2 == 1) & (area < knots[-1]), slope, 0.0)

    radii = np.sqrt(knots / math.pi)
    grid = np.unique(np.concatenate([[0.0], radii[radii <= outer], [outer]]))
    logger.debug(f"rearranged {u.family!r} on {r.size!r} nodes; outer radius {outer!r}")
    return RadialProfile(
        frame=Frame.U_FRAME,
        func=func,
        deriv=deriv,
        nodes=grid,
        support=(0.0, outer),
        breakpoints=tuple(float(x) for x in grid),
        family=f"rearranged({u.family})",
        params=dict(u.params),
    )


# ===== Comparison inequalities =====
def equimeasurability_residual(
    u: RadialProfile, u_star: RadialProfile | None = None, levels: int = 32
) -> float:
    """Largest gap between the distribution functions of u and u* over interior levels."""
    u = _u_frame(u)
    u_star = rearrange(u) if u_star is None else u_star
    top = float(np.max(u(_sample_grid(u))))
    if top <= 0.0:
        return 0.0
    grid = top * (np.arange(1, levels + 1) / (levels + 1))
    gap = np.abs(
        np.asarray(distribution_function(u, grid)) - np.asarray(distribution_function(u_star, grid))
    )
    return float(np.max(gap))


def _composite_gauss(f: Callable[[FloatArray], FloatArray], edges: FloatArray) -> float:
    """Sum of fixed-order Gauss rules over consecutive cells of ``edges``."""
    edges = np.unique(np.asarray(edges, dtype=np.float64))
    if edges.size < 2:
        return 0.0
    h = np.diff(edges)
    points = edges[:-1, None] + h[:, None] * _CELL_POINTS[None, :]
    with np.errstate(all="ignore"):
        values = np.asarray(f(points.ravel()), dtype=np.float64).reshape(points.shape)
    return float((values * _CELL_WEIGHTS[None, :] * h[:, None]).sum())


def _dirichlet_on(u: RadialProfile, radius: float) -> float:
    """2 pi int_0^radius u'(r)^2 r dr."""
    lo = max(u.support[0], 0.0)
    hi = min(u.support[1], radius)
    inner = [x for x in (*u.nodes, *u.breakpoints) if lo < x < hi]
    return _composite_gauss(
        lambda r: 2.0 * math.pi * r * np.asarray(u.derivative(r)) ** 2, [lo, *inner, hi]
    )


def check_polya_szego(
    u: RadialProfile, radius: float | None = None, tol: float = 1e-8
) -> PolyaSzegoReport:
    """Dirichlet energies of u* and u on B_radius.

    When ``u`` does not vanish at the outer end R of its support, u* has an
    infinite slope at its outer radius; the comparison is then made on B_0.99R
    and flagged ``boundary_singular``.
    """
    u = _u_frame(u)
    R = u.support[1]
    star = rearrange(u)
    boundary_singular = float(u(R)) > 0.0
    if radius is None:
        radius = 0.99 * R if boundary_singular else R
    lhs = _dirichlet_on(star, radius)
    rhs = _dirichlet_on(u, radius)
    return PolyaSzegoReport(
        lhs=lhs,
        rhs=rhs,
        holds=bool(lhs <= rhs + tol * max(rhs, 1.0)),
        boundary_singular=boundary_singular,
        radius=float(radius),
    )


def check_hardy_littlewood(
    u: RadialProfile, potential: PotentialSpec, q: float = 2.0, tol: float = 1e-8
) -> InequalityCheck:
    """int u^q V dx against int (u*)^q V dx for a nonincreasing weight V.

    Raises
    ------
    MonotonicityViolation
        If ``V`` increases somewhere on the support of ``u``.
    """
    if q < 1.0:
        raise DomainError(f"q must be at least 1, got q={q!r}")
    u = _u_frame(u)
    R = u.support[1]
    if not is_nonincreasing(potential, 1e-6 * R, R, n=2001):
        raise MonotonicityViolation(f"weight {potential.kind.value!r} increases on (0, {R!r}]")
    star = rearrange(u)
    s_lo = -math.log(R)

    def moment(profile: RadialProfile) -> float:
        # int |u|^q V dx = 2 pi int |u(e^-s)|^q r^2 V ds over s >= -ln R.
        def density(s: FloatArray) -> FloatArray:
            value = np.abs(np.asarray(profile(np.exp(-s)), dtype=np.float64))
            return 2.0 * math.pi * value**q * r2_potential(potential, s)

        nodes = np.asarray(profile.nodes)
        edges = [s_lo, *(-np.log(nodes[(nodes > 0.0) & (nodes < R)]))]
        if potential.kind is not PotentialKind.CUSTOM and s_lo < 1.0:
            edges.append(1.0)
        s_hi = max(edges)
        return _composite_gauss(density, edges) + integrate(density, s_hi, math.inf).value

    lhs, rhs = moment(u), moment(star)
    return InequalityCheck(lhs=lhs, rhs=rhs, holds=bool(lhs <= rhs + tol * max(rhs, 1.0)))


# ===== Envelopes of the q-remainder weight =====
def remainder_q_monotone_radius(q: float) -> float:
    """Largest r_q such that the q-remainder weight is nonincreasing on (0, r_q).

    With s = -ln r and a = 1 + q/2 the weight is nonincreasing in r exactly
    where 2 s >= a (1 + 1 / (1 + ln s)), s >= 1.
    """
    if q < 2.0:
        raise DomainError(f"q must be at least 2, got q={q!r}")
    a = 1.0 + q / 2.0

    def h(s: float) -> float:
        return 2.0 * s - a * (1.0 + 1.0 / (1.0 + math.log(s)))

    s_star = brentq(h, 1.0, 4.0 * a, xtol=1e-14)
    return math.exp(-s_star)


@dataclass(frozen=True)
class Envelopes:
    """Nonincreasing envelopes lower <= V <= upper on (0, R] with lower >= c_q upper."""

    upper: Callable[[FloatArray], FloatArray]
    lower: Callable[[FloatArray], FloatArray]
    c_q: float
    hat_radius: float
    r_q: float
    R: float


def envelope_decompose(
    potential: PotentialSpec,
    r_q: float,
    R: float,
    hat: HatChoice = HatChoice.LEFTMOST,
    nodes: int = 10_000,
) -> Envelopes:
    """Flat-extension envelopes of a weight decreasing on (0, r_q).

    The upper envelope follows V up to the freezing radius r_hat in (0, r_q),
    where V(r_hat) >= max over [r_q, R], and stays at V(r_hat) afterwards. The
    lower envelope follows V up to r_q and drops to the minimum over [r_q, R].

    Raises
    ------
    NoHatR
        If no sampled radius below r_q qualifies as r_hat.
    """
    if not 0.0 < r_q < R <= KINK_RADIUS + 1e-15:
        raise DomainError(f"need 0 < r_q < R <= 1/e, got r_q={r_q!r}, R={R!r}")
    outer = np.linspace(r_q, R, nodes)
    outer_values = eval_potential(potential, outer)
    top, bottom = float(np.max(outer_values)), float(np.min(outer_values))
    candidates = np.geomspace(1e-3 * r_q, r_q, nodes, endpoint=False)
    admissible = candidates[eval_potential(potential, candidates) >= top]
    if admissible.size == 0:
        raise NoHatR(f"no radius below r_q={r_q!r} dominates the weight on [r_q, R]")
    hat_radius = float(admissible[0] if hat is HatChoice.LEFTMOST else admissible[-1])
    frozen = float(eval_potential(potential, hat_radius))

    def upper(r: FloatArray) -> FloatArray:
        r = np.asarray(r, dtype=np.float64)
        return np.where(r <= hat_radius, eval_potential(potential, np.minimum(r, hat_radius)), frozen)

    def lower(r: FloatArray) -> FloatArray:
        r = np.asarray(r, dtype=np.float64)
        return np.where(r <= r_q, eval_potential(potential, np.minimum(r, r_q)), bottom)

    c_q = bottom / frozen
    logger.debug(f"envelopes: r_hat={hat_radius!r}, c_q={c_q!r}")
    return Envelopes(upper=upper, lower=lower, c_q=c_q, hat_radius=hat_radius, r_q=r_q, R=R)


# ===== Angular modes =====
@dataclass(frozen=True)
class ModeSet:
    """Angular modes u_m on a radial grid in the orthonormal basis.

    The basis is 1/sqrt(2 pi), cos(m theta)/sqrt(pi), sin(m theta)/sqrt(pi);
    ``cos[m]`` and ``sin[m]`` are the radial coefficient profiles.
    """

    radii: FloatArray
    cos: FloatArray
    sin: FloatArray
    parseval_residual: float

    @property
    def M(self) -> int:
        return self.cos.shape[0] - 1

    def energy_share(self) -> FloatArray:
        """Fraction of sum_r |u_m(r)|^2 carried by each m."""
        per_mode = (self.cos**2 + self.sin**2).sum(axis=1)
        total = per_mode.sum()
        return per_mode / total if total > 0 else per_mode

    def reconstruct(self, r_index: int, theta: FloatArray) -> FloatArray:
        """sum_m u_m(r) h_m(theta) at one radius of the grid."""
        theta = np.asarray(theta, dtype=np.float64)
        out = np.full_like(theta, self.cos[0, r_index] / math.sqrt(2.0 * math.pi))
        for m in range(1, self.M + 1):
            out += (
                self.cos[m, r_index] * np.cos(m * theta) + self.sin[m, r_index] * np.sin(m * theta)
            ) / math.sqrt(math.pi)
        return out


def _angles(n: int) -> FloatArray:
    return 2.0 * math.pi * np.arange(n) / n


def decompose_samples(samples: FloatArray, radii: FloatArray, M: int) -> ModeSet:
    """Modes 0..M of samples f(r_i, theta_j) on a uniform angular grid.

    Raises a ``AliasWarning`` when the top mode carries more than
    ``symmetry.alias_tolerance`` of the energy.
    """
    samples = np.asarray(samples, dtype=np.float64)
    n = samples.shape[1]
    if n < 4 * M:
        raise DomainError(f"need at least 4M = {4 * M!r} angular nodes, got {n!r}")
    coeffs = rfft(samples, axis=1)[:, : M + 1] * (2.0 * math.pi / n)
    cos = (coeffs.real / math.sqrt(math.pi)).T.copy()
    sin = (-coeffs.imag / math.sqrt(math.pi)).T.copy()
    cos[0] = coeffs[:, 0].real / math.sqrt(2.0 * math.pi)
    sin[0] = 0.0
    modal = (cos**2 + sin**2).sum(axis=0)
    direct = (2.0 * math.pi / n) * (samples**2).sum(axis=1)
    scale = max(float(np.max(np.abs(direct))), np.finfo(np.float64).tiny)
    residual = float(np.max(np.abs(modal - direct)) / scale)
    modes = ModeSet(radii=np.asarray(radii, dtype=np.float64), cos=cos, sin=sin, parseval_residual=residual)
    if M > 0 and modes.energy_share()[-1] > app_config.symmetry.alias_tolerance:
        warnings.warn(
            f"mode {M!r} carries {modes.energy_share()[-1]!r} of the energy; raise M",
            AliasWarning,
            stacklevel=2,
        )
    return modes


def decompose_modes(
    f: PolarFunction,
    M: int,
    radii: FloatArray | None = None,
    angular_nodes: int | None = None,
) -> ModeSet:
    """Modes 0..M of f(r, theta) by a discrete angular transform."""
    n = max(angular_nodes or app_config.symmetry.angular_nodes, 4 * M)
    if radii is None:
        radii = np.linspace(0.0, 1.0, app_config.symmetry.radial_nodes)
    radii = np.asarray(radii, dtype=np.float64)
    rr, tt = np.meshgrid(radii, _angles(n), indexing="ij")
    return decompose_samples(np.asarray(f(rr, tt), dtype=np.float64), radii, M)


def mode_energy(u: RadialProfile, m: int) -> tuple[float, float]:
    """Radial and centrifugal parts of int (u_m'^2 + m^2 u_m^2 / r^2) r dr."""
    lo, hi = u.support
    points = [x for x in u.breakpoints if lo < x < hi]
    radial = integrate(lambda r: r * np.asarray(u.derivative(r)) ** 2, lo, hi, points).value
    centrifugal = 0.0
    if m:
        centrifugal = integrate(
            lambda r: m * m * np.asarray(u(r)) ** 2 / r, lo, hi, points
        ).value
    return radial, centrifugal


def mode_energy_identity(
    f: PolarFunction, M: int, R: float = 1.0, radial_nodes: int = 96
) -> ModeEnergyReport:
    """Dirichlet energy of f on B_R against the sum of its mode energies.

    The left side uses tensor quadrature of f_r^2 + f_theta^2 / r^2 with
    derivatives by central differences; the right side differentiates the
    mode coefficients through the transform of f_r.
    """
    x, w = np.polynomial.legendre.leggauss(radial_nodes)
    r = 0.5 * R * (x + 1.0)
    w = 0.5 * R * w
    n = max(app_config.symmetry.angular_nodes, 4 * M)
    theta = _angles(n)
    rr, tt = np.meshgrid(r, theta, indexing="ij")
    h_r = 1e-6 * R
    h_t = 1e-6
    f_r = (f(rr + h_r, tt) - f(rr - h_r, tt)) / (2.0 * h_r)
    f_t = (f(rr, tt + h_t) - f(rr, tt - h_t)) / (2.0 * h_t)
    density = (f_r**2 + f_t**2 / rr**2).sum(axis=1) * (2.0 * math.pi / n)
    lhs = float((density * r * w).sum())

    modes = decompose_samples(np.asarray(f(rr, tt)), r, M)
    slopes = decompose_samples(np.asarray(f_r), r, M)
    m2 = (np.arange(M + 1) ** 2)[:, None]
    per_r = slopes.cos**2 + slopes.sin**2 + m2 * (modes.cos**2 + modes.sin**2) / r[None, :] ** 2
    terms = (per_r * (r * w)[None, :]).sum(axis=1)
    rhs = float(terms.sum())
    residual = abs(lhs - rhs) / lhs if lhs > 0 else abs(rhs)
    return ModeEnergyReport(
        lhs=lhs, rhs=rhs, residual=float(residual), terms=tuple(float(t) for t in terms)
    )


__all__: list[str] = [
    "Envelopes",
    "ModeSet",
    "check_hardy_littlewood",
    "check_polya_szego",
    "decompose_modes",
    "decompose_samples",
    "distribution_function",
    "envelope_decompose",
    "equimeasurability_residual",
    "mode_energy",
    "mode_energy_identity",
    "rearrange",
    "remainder_q_monotone_radius",
]
