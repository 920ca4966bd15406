"""
Experiments over profile families: Moser-functional tables with growth
verdicts, the critical exponent search, the quarter-case and off-center
demonstrations, and stress runs of the improved inequalities on random profiles.
"""

import math
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from typing import Any

import numpy as np

from src import create_logger
from src.config import app_config
from src.exceptions import (
    BracketFailure,
    DomainError,
    GeometryError,
    MonotonicityViolation,
    ZeroDenominator,
)
from src.logic.profiles import (
    bisect_panels,
    concentrating_family,
    h0_profile,
    moser_family,
    plateau_family,
    wkappa_family,
    zeta_t1,
)
from src.logic.profiles import random_profile as make_random_profile
from src.logic.quadrature import integrate, moser_log, remainder_ratio
from src.logic.transforms import constants_for
from src.logic.weights import eval_potential, potential_from_name
from src.schemas import PotentialSpec, StressSummary, SweepResult
from src.schemas.profile import RadialProfile
from src.schemas.types import (
    FamilyName,
    FloatArray,
    MoserConvention,
    RatioFlag,
    RatioVariant,
    Smoothness,
    SweepFamily,
    Verdict,
)

logger = create_logger(name="sweeps")

_DEFICIT_VARIANTS: frozenset[RatioVariant] = frozenset(
    {
        RatioVariant.REMAINDER_L2,
        RatioVariant.REMAINDER_LQ,
        RatioVariant.REMAINDER_LQ_BALL,
        RatioVariant.ITERATED_LOG,
    }
)


def _map[T, R](fn: Callable[[T], R], items: Sequence[T], jobs: int | None) -> list[R]:
    """Order-preserving map over ``jobs`` worker threads."""
    jobs = jobs or app_config.sweep.jobs
    if jobs <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


# ===== Verdicts =====
def growth_verdict(
    axis: Sequence[float], logs: Sequence[float], ratio: float | None = None
) -> Verdict:
    """GROWING when the log-functional rises by more than ln(ratio) over the top octave.

    The octave runs from the largest index not above half the top index to the
    top index. An infinite value at the top counts as growth.
    """
    ratio = ratio or app_config.sweep.growth_ratio
    top = axis[-1]
    ref = max((i for i, x in enumerate(axis) if x <= top / 2.0), default=0)
    last, base = logs[-1], logs[ref]
    if math.isinf(last) and last > 0:
        return Verdict.GROWING
    return Verdict.GROWING if last - base > math.log(ratio) else Verdict.BOUNDED


def _check_monotone_in_alpha(result: SweepResult) -> None:
    """moser_log is nondecreasing in alpha at every index; verdicts never go back to bounded."""
    table = np.asarray(result.table, dtype=np.float64)
    with np.errstate(invalid="ignore"):
        drops = np.diff(table, axis=0) < -1e-9 * np.maximum(np.abs(table[1:]), 1.0)
    if np.any(drops & np.isfinite(table[1:])):
        raise MonotonicityViolation(f"moser_log decreases in {result.axis2_name}: {result.table!r}")
    verdicts = result.verdicts
    first_growing = next((i for i, v in enumerate(verdicts) if v is Verdict.GROWING), None)
    if first_growing is not None and Verdict.BOUNDED in verdicts[first_growing:]:
        raise MonotonicityViolation(
            f"bounded verdict above a growing {result.axis2_name}: "
            f"{result.axis2!r} -> {[v.value for v in verdicts]!r}"
        )


# ===== Families =====
def family_profile(family: FamilyName, index: float, mu: float = 0.0, **params: Any) -> RadialProfile:
    """Member ``index`` (n, kappa or t1) of a named family."""
    match family:
        case FamilyName.MOSER:
            return moser_family(int(index), mu)
        case FamilyName.CONCENTRATING:
            return concentrating_family(int(index), mu, t_eps=params.get("t_eps", 0.0))
        case FamilyName.PLATEAU:
            return plateau_family(
                int(index),
                offset=params.get("offset", 0.5),
                radius=params.get("radius", 0.25),
            )
        case FamilyName.WKAPPA:
            return wkappa_family(float(index))
        case FamilyName.ZETA_T1:
            return zeta_t1(float(index), params.get("tau0", 0.0))
        case FamilyName.H0:
            return h0_profile()
        case _:
            raise DomainError(f"family {family.value!r} has no index")


def moser_sweep(
    family: FamilyName,
    mu: float,
    ns: Sequence[float],
    alphas: Sequence[float],
    p: float = 2.0,
    convention: MoserConvention = MoserConvention.EXACT,
    jobs: int | None = None,
    builder: Callable[[float], RadialProfile] | None = None,
    **params: Any,
) -> SweepResult:
    """Table of ln int exp(alpha |u_n|^p) over family indices and exponents.

    Rows follow the sorted ``alphas``; each row gets a growth verdict.

    Raises
    ------
    MonotonicityViolation
        If a row decreases in alpha or the verdicts are not monotone.
    """
    ns = sorted(float(n) for n in ns)
    alphas = sorted(float(a) for a in alphas)
    if not ns or not alphas:
        raise DomainError("sweeps need at least one index and one exponent")
    build = builder or (lambda n: family_profile(family, n, mu, **params))
    profiles = _map(build, ns, jobs)

    def row(alpha: float) -> list[float]:
        return [moser_log(u, alpha, p, convention).log_value for u in profiles]

    table = _map(row, alphas, jobs)
    verdicts = [growth_verdict(ns, logs) for logs in table]
    result = SweepResult(
        family=family.value,
        params={"mu": float(mu), "p": float(p), **{k: float(v) for k, v in params.items()}},
        axis1=ns,
        axis2=alphas,
        axis2_name="alpha",
        table=table,
        verdicts=verdicts,
        seed=app_config.sweep.seed,
    )
    _check_monotone_in_alpha(result)
    logger.info(f"{family.value!r} sweep: {[v.value for v in verdicts]!r}")
    return result


# ===== Critical exponent =====
def critical_alpha_search(
    mu: float,
    family: SweepFamily = SweepFamily.MOSER,
    n_max: int | None = None,
    bracket: tuple[float, float] | None = None,
    tol: float | None = None,
) -> SweepResult:
    """Bisection on alpha for the radial critical exponent 4 pi sqrt(1 + 4 mu).

    An alpha is growing when moser_log(n_max) - moser_log(n_max / 2) exceeds
    ln ``sweep.growth_ratio``. The returned table lists every evaluated alpha.

    Raises
    ------
    BracketFailure
        If both ends of the bracket get the same verdict.
    """
    consts = constants_for(mu)
    if consts.sigma == 0.0:
        raise DomainError("mu = -1/4 has no radial critical exponent")
    if family is SweepFamily.CONCENTRATING and not -0.25 < mu < 0.0:
        raise DomainError(f"the concentrating family needs -1/4 < mu < 0, got mu={mu!r}")
    m = consts.m
    n_max = n_max or app_config.sweep.n_max
    lo, hi = bracket or (m / 2.0, 2.0 * m)
    tol = tol or m / 100.0
    ns = [float(n_max // 2), float(n_max)]
    name = FamilyName(family.value)
    profiles = [family_profile(name, n, mu) for n in ns]
    evaluated: dict[float, list[float]] = {}

    def classify(alpha: float) -> Verdict:
        logs = [moser_log(u, alpha).log_value for u in profiles]
        evaluated[alpha] = logs
        verdict = growth_verdict(ns, logs)
        logger.debug(f"alpha={alpha!r}: {logs!r} -> {verdict.value}")
        return verdict

    def table() -> SweepResult:
        alphas = sorted(evaluated)
        rows = [evaluated[a] for a in alphas]
        return SweepResult(
            family=family.value,
            params={"mu": float(mu), "m": m},
            axis1=ns,
            axis2=alphas,
            table=rows,
            verdicts=[growth_verdict(ns, r) for r in rows],
            critical_estimate=None,
            seed=app_config.sweep.seed,
        )

    if classify(lo) is not Verdict.BOUNDED or classify(hi) is not Verdict.GROWING:
        result = table()
        raise BracketFailure(
            f"bracket [{lo!r}, {hi!r}] does not separate bounded from growing", result
        )
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if classify(mid) is Verdict.GROWING:
            hi = mid
        else:
            lo = mid
    result = table().model_copy(update={"critical_estimate": 0.5 * (lo + hi)})
    _check_monotone_in_alpha(result)
    logger.info(f"critical alpha at mu={mu!r}: {result.critical_estimate!r} (m_mu={m!r})")
    return result


def critical_alpha(
    mu: float,
    family: SweepFamily = SweepFamily.MOSER,
    n_max: int | None = None,
    bracket: tuple[float, float] | None = None,
    tol: float | None = None,
) -> float:
    """Estimate of the radial critical exponent; see `critical_alpha_search`."""
    estimate = critical_alpha_search(mu, family, n_max, bracket, tol).critical_estimate
    assert estimate is not None
    return estimate


# ===== Quarter case =====
def quarter_case_sweep(
    ps: Sequence[float],
    alphas: Sequence[float],
    kappas: Sequence[float] | None = None,
    convention: MoserConvention = MoserConvention.EXACT,
    jobs: int | None = None,
) -> SweepResult:
    """Verdicts for the unit-energy kappa-family at mu = -1/4, one row per (p, alpha).

    Rows are ordered by p, then alpha; ``params`` records the pairs as
    ``p<i>`` and ``alpha<i>``.
    """
    if kappas is None:
        top = app_config.sweep.kappa_max
        kappas = [top / 16.0, top / 8.0, top / 4.0, top / 2.0, top]
    kappas = sorted(float(k) for k in kappas)
    pairs = [(float(p), float(a)) for p in sorted(ps) for a in sorted(alphas)]
    profiles = _map(wkappa_family, kappas, jobs)

    def row(pair: tuple[float, float]) -> list[float]:
        p, alpha = pair
        return [moser_log(u, alpha, p, convention).log_value for u in profiles]

    table = _map(row, pairs, jobs)
    params: dict[str, float] = {}
    for i, (p, alpha) in enumerate(pairs):
        params[f"p{i}"], params[f"alpha{i}"] = p, alpha
    verdicts = [growth_verdict(kappas, logs) for logs in table]
    for (p, alpha), verdict in zip(pairs, verdicts):
        logger.info(f"quarter case p={p!r}, alpha={alpha!r}: {verdict.value}")
    return SweepResult(
        family=FamilyName.WKAPPA.value,
        params=params,
        axis1=kappas,
        axis2=[float(i) for i in range(len(pairs))],
        axis2_name="pair",
        table=table,
        verdicts=verdicts,
        seed=app_config.sweep.seed,
    )


# ===== Off-center concentration =====
def _angular_mean(potential: PotentialSpec, offset: float, rho: FloatArray, nodes: int) -> FloatArray:
    """Mean of V(|x0 + rho e^{i theta}|) over theta."""
    theta = 2.0 * math.pi * np.arange(nodes) / nodes
    rho = np.asarray(rho, dtype=np.float64)
    radii = np.sqrt(offset**2 + rho[..., None] ** 2 + 2.0 * offset * rho[..., None] * np.cos(theta))
    return np.mean(eval_potential(potential, radii), axis=-1)


def plateau_norm(u: RadialProfile, mu: float, potential: PotentialSpec) -> float:
    """||u||_{V,mu} of an off-center plateau bump.

    The Dirichlet part is 4 pi int w'^2 dt; the potential part uses the angular
    mean of V on circles about the bump centre.
    """
    gauge = u.gauge
    if gauge is None:
        raise DomainError("plateau_norm expects a w-frame profile")
    radius = float(u.params["radius"])
    nodes = app_config.symmetry.angular_nodes
    energy_end = u.energy_end
    dirichlet = integrate(
        lambda t: 4.0 * math.pi * np.asarray(u.derivative(t)) ** 2,
        u.support[0],
        energy_end,
        u.breakpoints,
    ).value

    def density(t: FloatArray) -> FloatArray:
        rho = radius * np.exp(-np.asarray(t) / 2.0)
        w = np.asarray(u(t))
        mean = _angular_mean(potential, u.offset, rho, nodes)
        return math.pi * radius**2 * w**2 * mean * np.exp(-np.asarray(t))

    pot = integrate(density, u.support[0], math.inf, u.breakpoints).value
    return math.sqrt(dirichlet + mu * pot)


def nonradial_gap_demo(
    mu: float,
    alphas: Sequence[float],
    potential: PotentialSpec | None = None,
    offset: float = 0.5,
    radius: float = 0.25,
    ns: Sequence[int] | None = None,
    jobs: int | None = None,
) -> SweepResult:
    """Moser table of the normalized off-center plateau family.

    Each member is divided by its computed norm ||u_n||_{V,mu}, so the family
    lies on the unit sphere of the norm; the verdicts expose growth for every
    alpha above 4 pi, regardless of the radial exponent 4 pi sqrt(1 + 4 mu).

    Raises
    ------
    GeometryError
        If the bump does not fit inside B_1 away from the origin.
    """
    if not mu > 0.0:
        raise DomainError(f"mu must be positive, got mu={mu!r}")
    if not (0.0 < radius < offset and offset + radius < 1.0):
        raise GeometryError(
            f"bump of radius {radius!r} at distance {offset!r} leaves the punctured disk"
        )
    potential = potential or potential_from_name("leray")
    if ns is None:
        top = app_config.sweep.n_max
        ns = [top // 8, top // 4, top // 2, top]
    ns = sorted(int(n) for n in ns)

    def build(n: float) -> RadialProfile:
        u = plateau_family(int(n), offset=offset, radius=radius)
        norm = plateau_norm(u, mu, potential)
        logger.debug(f"plateau n={n!r}: norm {norm!r}")
        return u.scaled(1.0 / norm)

    result = moser_sweep(
        FamilyName.PLATEAU,
        mu,
        [float(n) for n in ns],
        alphas,
        jobs=jobs,
        builder=build,
        offset=offset,
        radius=radius,
    )
    return result.model_copy(
        update={"params": {**result.params, "m_mu": constants_for(mu).m}}
    )


# ===== Stress runs =====
def profile_seeds(seed: int, count: int) -> list[int]:
    """``count`` child seeds of ``seed``, stable across runs and platforms."""
    return [int(s) for s in np.random.SeedSequence(seed).generate_state(count)]


def inequality_stress(
    variant: RatioVariant,
    count: int,
    seed: int | None = None,
    *,
    q: float = 4.0,
    K: int = 3,
    outer_radius: float = 0.95,
    smoothness: Smoothness = Smoothness.SMOOTH_BUMP_SUM,
    jobs: int | None = None,
) -> StressSummary:
    """Minimum of ``remainder_ratio`` over seeded random profiles.

    The minimizing profile is evaluated again at double resolution: every
    quadrature panel is bisected (`bisect_panels`) and the tolerance is a
    hundredfold tighter. For the deficit variants a negative ratio at both
    resolutions sets ``red_flag``. Zero and near-zero denominators are counted
    in ``flagged`` and left out of the minimum.
    """
    if count < 1:
        raise DomainError(f"count must be positive, got count={count!r}")
    seed = app_config.sweep.seed if seed is None else seed
    seeds = profile_seeds(seed, count)

    def evaluate(child: int) -> tuple[float, float, bool]:
        u = make_random_profile(child, smoothness=smoothness, outer_radius=outer_radius)
        try:
            report = remainder_ratio(u, variant, q=q, K=K)
        except ZeroDenominator:
            return math.inf, math.inf, True
        return report.ratio, report.lhs, report.flag is not RatioFlag.OK

    rows = _map(evaluate, seeds, jobs)
    valid = [(ratio, lhs, s) for (ratio, lhs, flagged), s in zip(rows, seeds) if not flagged]
    flagged = count - len(valid)
    if not valid:
        raise DomainError("every random profile was flagged")
    min_ratio, _, argmin = min(valid)
    min_deficit = min(lhs for _, lhs, _ in valid) if variant in _DEFICIT_VARIANTS else None
    worst = make_random_profile(argmin, smoothness=smoothness, outer_radius=outer_radius)
    tol = app_config.quad.tol / 100.0
    refined = remainder_ratio(bisect_panels(worst), variant, q=q, K=K, tol=tol).ratio
    red_flag = variant in _DEFICIT_VARIANTS and min_ratio < 0.0 and refined < 0.0
    if red_flag:
        logger.error(f"{variant.value!r}: negative ratio {min_ratio!r} at seed {argmin!r}")
    logger.info(f"{variant.value!r} stress over {count!r} profiles: min ratio {min_ratio!r}")
    return StressSummary(
        variant=variant,
        count=count,
        min_ratio=min_ratio,
        argmin_seed=argmin,
        refined_ratio=refined,
        min_deficit=min_deficit,
        flagged=flagged,
        red_flag=red_flag,
    )


__all__: list[str] = [
    "critical_alpha",
    "critical_alpha_search",
    "family_profile",
    "growth_verdict",
    "inequality_stress",
    "moser_sweep",
    "nonradial_gap_demo",
    "plateau_norm",
    "profile_seeds",
    "quarter_case_sweep",
]
