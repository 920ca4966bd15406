"""
Singular potentials and remainder weights on radii in (0, 1).

Every weight is available in two forms: ``eval_potential`` in the radius r and
``r2_potential`` giving r^2 V(r) as a function of s = -ln r, which stays
representable when r itself underflows.
"""

import math

import numpy as np
from scipy import optimize

from src import create_logger
from src.exceptions import DomainError, OverflowSignal
from src.schemas import IterChain, PotentialSpec
from src.schemas.types import ArrayLike, FloatArray, PotentialKind

logger = create_logger(name="weights")

# ln ln(1/r) changes sign at r = 1/e; the |.| weights have a kink there.
KINK_RADIUS: float = math.exp(-1.0)

_PARAMETRIC: dict[str, PotentialKind] = {
    "remq": PotentialKind.REMAINDER_Q,
    "iterlog": PotentialKind.ITERATED_LOG_SERIES,
    "const": PotentialKind.CONSTANT,
}


def potential_from_name(name: str, scale: float = 1.0) -> PotentialSpec:
    """Parse a CLI potential name such as ``v3``, ``remq:4`` or ``iterlog:5``.

    Raises
    ------
    DomainError
        If the name is unknown or its parameter is malformed.
    """
    head, _, arg = name.strip().partition(":")
    try:
        if head in _PARAMETRIC:
            if not arg:
                raise DomainError(f"potential {name!r} needs a parameter after ':'")
            kind = _PARAMETRIC[head]
            match kind:
                case PotentialKind.REMAINDER_Q:
                    return PotentialSpec(kind=kind, q=float(arg), scale=scale)
                case PotentialKind.ITERATED_LOG_SERIES:
                    return PotentialSpec(kind=kind, K=int(arg), scale=scale)
                case _:
                    return PotentialSpec(kind=kind, c=float(arg), scale=scale)
        kind = PotentialKind(head)
    except ValueError as e:
        if isinstance(e, DomainError):
            raise
        raise DomainError(f"invalid potential name {name!r}: {e}") from None
    if kind is PotentialKind.CUSTOM:
        raise DomainError("custom potentials are defined in config files, not by name")
    return PotentialSpec(kind=kind, scale=scale)


def _as_array(r: ArrayLike) -> tuple[FloatArray, bool]:
    arr = np.asarray(r, dtype=np.float64)
    return arr, arr.ndim == 0


def _iterated_log_from_s(k: int, s: FloatArray) -> FloatArray:
    """Rows X_1 .. X_k evaluated at r = exp(-s)."""
    chain = np.empty((k, *s.shape), dtype=np.float64)
    chain[0] = 1.0 / (1.0 + s)
    for j in range(1, k):
        chain[j] = 1.0 / (1.0 - np.log(chain[j - 1]))
    return chain


def _series_from_s(K: int, s: FloatArray) -> FloatArray:
    """(1/4) sum_{i=2}^{K} prod_{j<=i} X_j^2, i.e. r^2 times the series weight."""
    products = np.cumprod(_iterated_log_from_s(K, s) ** 2, axis=0)
    return 0.25 * products[1:].sum(axis=0)


def r2_potential(spec: PotentialSpec, s: ArrayLike) -> FloatArray:
    """r^2 V(r) at r = exp(-s), s > 0.

    Parameters
    ----------
    spec : PotentialSpec
        The weight.
    s : float or array
        Values of -ln r.

    Returns
    -------
    FloatArray
        Same shape as ``s``. Finite for every s > 0 (and s = 0 for the kinds
        closed at r = 1).
    """
    s_arr, scalar = _as_array(s)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        match spec.kind:
            case PotentialKind.LERAY_NORMALIZED:
                out = 1.0 / s_arr**2
            case PotentialKind.LERAY_QUARTER:
                out = 0.25 / s_arr**2
            case PotentialKind.SHIFTED_LERAY:
                out = 1.0 / (1.0 + s_arr) ** 2
            case PotentialKind.PSARADAKIS_SPECTOR:
                out = 0.25 / (1.0 + s_arr) ** 2
            case PotentialKind.WANG_YE:
                out = np.exp(-2.0 * s_arr) / np.expm1(-2.0 * s_arr) ** 2
            case PotentialKind.TINTAREV:
                out = 0.25 / (s_arr**2 * np.maximum(np.sqrt(s_arr), 1.0))
            case PotentialKind.REMAINDER_2:
                out = 1.0 / (s_arr * (1.0 + np.abs(np.log(s_arr)))) ** 2
            case PotentialKind.REMAINDER_Q:
                out = (s_arr * (1.0 + np.abs(np.log(s_arr)))) ** (-(1.0 + spec.q / 2))  # type: ignore[operator]
            case PotentialKind.ITERATED_LOG_SERIES:
                out = _series_from_s(spec.K, s_arr)  # type: ignore[arg-type]
            case PotentialKind.CONSTANT:
                out = spec.c * np.exp(-2.0 * s_arr)  # type: ignore[operator]
            case PotentialKind.CUSTOM:
                r = np.exp(-s_arr)
                out = r**2 * _custom_values(spec, r)
    out = spec.scale * out
    return float(out) if scalar else out  # type: ignore[return-value]


def _custom_values(spec: PotentialSpec, r: FloatArray) -> FloatArray:
    # Interpolate in x = ln ln(e / r), decreasing in r, hence the reversals.
    x_nodes = np.log1p(-np.log(np.asarray(spec.abscissa)))[::-1]
    v_nodes = np.asarray(spec.table)[::-1]
    return np.interp(np.log1p(-np.log(r)), x_nodes, v_nodes)


def _check_radii(spec: PotentialSpec, r: FloatArray) -> None:
    lo, hi = spec.domain
    if spec.kind is PotentialKind.CUSTOM:
        bad = (r < lo) | (r > hi) | ~np.isfinite(r)
    elif spec.closed_at_one:
        bad = (r <= lo) | (r > hi) | ~np.isfinite(r)
    else:
        bad = (r <= lo) | (r >= hi) | ~np.isfinite(r)
    if np.any(bad):
        first = float(np.asarray(r)[bad].flat[0])
        raise DomainError(
            f"{spec.name!r} is defined for r in ({lo!r}, {hi!r}), got r={first!r}"
        )


def eval_potential(
    spec: PotentialSpec, r: ArrayLike, *, strict: bool = False
) -> float | FloatArray:
    """Closed-form value of the weight at radius ``r``.

    Values too large for a double are returned as ``+inf``; with
    ``strict=True`` an `OverflowSignal` is raised instead.

    Raises
    ------
    DomainError
        If any radius lies outside the open domain of the weight.
    """
    r_arr, scalar = _as_array(r)
    _check_radii(spec, r_arr)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        s = -np.log(r_arr)
        match spec.kind:
            case PotentialKind.LERAY_NORMALIZED:
                out = 1.0 / (r_arr**2 * s**2)
            case PotentialKind.LERAY_QUARTER:
                out = 1.0 / (4.0 * r_arr**2 * s**2)
            case PotentialKind.SHIFTED_LERAY:
                out = 1.0 / (r_arr**2 * (1.0 + s) ** 2)
            case PotentialKind.PSARADAKIS_SPECTOR:
                out = 1.0 / (4.0 * r_arr**2 * (1.0 + s) ** 2)
            case PotentialKind.WANG_YE:
                out = 1.0 / (1.0 - r_arr**2) ** 2
            case PotentialKind.TINTAREV:
                out = 1.0 / (4.0 * r_arr**2 * s**2 * np.maximum(np.sqrt(s), 1.0))
            case PotentialKind.REMAINDER_2:
                out = 1.0 / (r_arr**2 * s**2 * (1.0 + np.abs(np.log(s))) ** 2)
            case PotentialKind.REMAINDER_Q:
                core = (s * (1.0 + np.abs(np.log(s)))) ** (1.0 + spec.q / 2)  # type: ignore[operator]
                out = 1.0 / (r_arr**2 * core)
            case PotentialKind.ITERATED_LOG_SERIES:
                out = _series_from_s(spec.K, s) / r_arr**2  # type: ignore[arg-type]
            case PotentialKind.CONSTANT:
                out = np.full_like(r_arr, spec.c)
            case PotentialKind.CUSTOM:
                out = _custom_values(spec, r_arr)
        out = spec.scale * out
    if np.any(np.isinf(out)):
        logger.debug(f"{spec.name!r} overflows at {int(np.isinf(out).sum())} radii")
        if strict:
            raise OverflowSignal(f"{spec.name!r} exceeds the double range near r=0")
    return float(out) if scalar else out


def iterated_log(k: int, r: float) -> IterChain:
    """The chain X_1(r), ..., X_k(r) with X_1(r) = 1/ln(e/r), X_j = X_1(X_{j-1}).

    Raises
    ------
    DomainError
        If ``k < 1`` or ``r`` is outside (0, 1].
    """
    if k < 1:
        raise DomainError(f"chain depth must be >= 1, got k={k!r}")
    if not (0.0 < r <= 1.0):
        raise DomainError(f"iterated logarithms need r in (0, 1], got r={r!r}")
    chain = _iterated_log_from_s(k, np.asarray(-math.log(r)))
    return IterChain(r=float(r), values=tuple(float(x) for x in chain))


def remainder_series_weight(r: ArrayLike, K: int) -> float | FloatArray:
    """(1/4) r^-2 sum_{i=2}^{K} prod_{j=1}^{i} X_j(r)^2 for r in (0, 1)."""
    if K < 2:
        raise DomainError(f"the series needs K >= 2, got K={K!r}")
    spec = PotentialSpec(kind=PotentialKind.ITERATED_LOG_SERIES, K=K)
    return eval_potential(spec, r)


def potential_table(spec: PotentialSpec, radii: FloatArray) -> list[tuple[float, float]]:
    """Rows (r, V(r)) for a table of radii."""
    values = np.atleast_1d(eval_potential(spec, radii))
    return [(float(r), float(v)) for r, v in zip(np.atleast_1d(radii), values)]


def is_nonincreasing(
    spec: PotentialSpec, lo: float, hi: float, n: int = 10_000, rtol: float = 1e-12
) -> bool:
    """Whether V is nonincreasing on [lo, hi] up to roundoff, on a geometric grid."""
    grid = np.geomspace(lo, hi, n)
    values = np.asarray(eval_potential(spec, grid))
    return bool(np.all(np.diff(values) <= rtol * np.abs(values[1:])))


# ===== Conditions relative to the normalized Leray potential =====
def leray_ratio(spec: PotentialSpec, s: ArrayLike) -> FloatArray:
    """g(s) = r^2 (ln r)^2 V(r) at r = exp(-s); g = 1 for the normalized potential."""
    s_arr = np.asarray(s, dtype=np.float64)
    return s_arr**2 * r2_potential(spec, s_arr)


def check_condition_upper(spec: PotentialSpec, n: int = 10_000) -> bool:
    """V(r) <= 1/(r^2 ln^2 r) on (0, 1), sampled for s in [1e-6, 1e6]."""
    g = leray_ratio(spec, np.geomspace(1e-6, 1e6, n))
    return bool(np.all(g <= 1.0 + 1e-12))


def check_condition_lower(spec: PotentialSpec, n: int = 10_000) -> bool:
    """V(r) >= 1/(r^2 ln^2 r) on (0, 1), sampled for s in [1e-6, 1e6]."""
    g = leray_ratio(spec, np.geomspace(1e-6, 1e6, n))
    return bool(np.all(g >= 1.0 - 1e-12))


def check_condition_limit(spec: PotentialSpec, tol: float = 1e-3) -> bool:
    """r^2 ln^2 r V(r) -> 1 as r -> 0, sampled at s = 1e4 .. 1e8."""
    deviation = np.abs(leray_ratio(spec, np.geomspace(1e4, 1e8, 9)) - 1.0)
    return bool(deviation[-1] <= tol and np.all(np.diff(deviation) <= 1e-15))


def fit_condition_rate(spec: PotentialSpec, n: int = 400) -> tuple[float, float]:
    """Fit |g(s) - 1| <= C s^-theta for r in (0, 1/4).

    Returns
    -------
    tuple[float, float]
        ``(theta, C)`` where theta is the least-squares log-log slope and C the
        smallest constant making the bound hold on the sample.
    """
    s = np.geomspace(math.log(4.0), 1e6, n)
    dev = np.abs(leray_ratio(spec, s) - 1.0)
    keep = dev > 0
    if not np.any(keep):
        return (math.inf, 0.0)
    slope, _ = np.polyfit(np.log(s[keep]), np.log(dev[keep]), 1)
    theta = float(-slope)
    C = float(np.max(dev[keep] * s[keep] ** theta))
    return (theta, C)


def epsilon_shift(spec: PotentialSpec, epsilon: float) -> float:
    """Smallest t_eps >= 0 with |r^2 ln^2 r V(r) - 1| <= epsilon for r <= exp(-t_eps/2).

    Raises
    ------
    DomainError
        If ``epsilon <= 0`` or the weight is not asymptotic to the normalized
        Leray potential.
    """
    if epsilon <= 0:
        raise DomainError(f"epsilon must be positive, got {epsilon!r}")
    s = np.geomspace(1e-8, 1e8, 4001)
    excess = np.abs(leray_ratio(spec, s) - 1.0) - epsilon
    violating = np.flatnonzero(excess > 0)
    if violating.size == 0:
        return 0.0
    last = int(violating[-1])
    if last == s.size - 1:
        raise DomainError(
            f"{spec.name!r} stays farther than {epsilon!r} from the Leray potential"
        )

    def h(x: float) -> float:
        return float(abs(leray_ratio(spec, x) - 1.0) - epsilon)

    s_eps = optimize.brentq(h, float(s[last]), float(s[last + 1]), xtol=1e-12)
    logger.debug(f"epsilon shift of {spec.name!r} at eps={epsilon!r}: s={s_eps!r}")
    return 2.0 * float(s_eps)
