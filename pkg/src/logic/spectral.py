"""
Finite-element discretization of the radial quadratic forms and the smallest
generalized Rayleigh quotient.

Forms are assembled with piecewise-linear elements on a t-grid of a gauge frame.
The smallest eigenvalue of (A, B) is bracketed by Sturm counts of the inertia of
A - sigma B and refined by shifted inverse iteration with tridiagonal solves.
"""

import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_banded

from src import create_logger
from src.config import app_config
from src.exceptions import DomainError, GaugeMismatch, NoConvergence
from src.logic.transforms import GaugeTransform, gauge_b, gauge_c
from src.logic.weights import KINK_RADIUS, potential_from_name, r2_potential
from src.schemas import LadderReport, LadderRow, PotentialSpec
from src.schemas.types import FloatArray, GaugeTag, RatioVariant, RealFunction

logger = create_logger(name="spectral")

_GAUSS_X, _GAUSS_W = np.polynomial.legendre.leggauss(3)
# Gauss points and weights on [0, 1].
GAUSS_POINTS: FloatArray = 0.5 * (_GAUSS_X + 1.0)
GAUSS_WEIGHTS: FloatArray = 0.5 * _GAUSS_W


@dataclass(frozen=True)
class DiscreteForm:
    """Pair of symmetric tridiagonal forms on the nodes of ``grid``.

    ``a_diag``/``a_off`` and ``b_diag``/``b_off`` hold every node; the unknowns
    are the nodes left after removing the Dirichlet ends named by ``dirichlet``.
    """

    grid: FloatArray
    a_diag: FloatArray
    a_off: FloatArray
    b_diag: FloatArray
    b_off: FloatArray
    dirichlet: tuple[bool, bool] = (True, True)
    label: str = ""
    free: slice = field(init=False)

    def __post_init__(self) -> None:
        n = self.grid.size
        if not (self.a_diag.size == self.b_diag.size == n):
            raise DomainError("diagonals must have one entry per grid node")
        if not (self.a_off.size == self.b_off.size == n - 1):
            raise DomainError("off-diagonals must have one entry per element")
        start = 1 if self.dirichlet[0] else 0
        stop = n - 1 if self.dirichlet[1] else n
        object.__setattr__(self, "free", slice(start, stop))
        if np.any(self.b_diag[self.free] <= 0.0):
            raise DomainError(f"mass form of {self.label!r} is not positive on the unknowns")

    @property
    def N(self) -> int:
        """Number of unknowns."""
        return self.free.stop - self.free.start

    def _restrict(self, diag: FloatArray, off: FloatArray) -> tuple[FloatArray, FloatArray]:
        s = self.free
        return diag[s], off[s.start : s.stop - 1]

    @property
    def A(self) -> tuple[FloatArray, FloatArray]:
        """Diagonal and off-diagonal of the energy form on the unknowns."""
        return self._restrict(self.a_diag, self.a_off)

    @property
    def B(self) -> tuple[FloatArray, FloatArray]:
        """Diagonal and off-diagonal of the mass form on the unknowns."""
        return self._restrict(self.b_diag, self.b_off)

    def scaled(self, c: float, d: float | None = None) -> "DiscreteForm":
        """The pair (c A, d B); ``d`` defaults to ``c``."""
        d = c if d is None else d
        return DiscreteForm(
            grid=self.grid,
            a_diag=c * self.a_diag,
            a_off=c * self.a_off,
            b_diag=d * self.b_diag,
            b_off=d * self.b_off,
            dirichlet=self.dirichlet,
            label=self.label,
        )


@dataclass(frozen=True)
class EigenResult:
    value: float
    vector: FloatArray
    residual: float
    iterations: int
    converged: bool


# ===== Tridiagonal helpers =====
def tridiagonal_matvec(diag: FloatArray, off: FloatArray, x: FloatArray) -> FloatArray:
    y = diag * x
    y[:-1] += off * x[1:]
    y[1:] += off * x[:-1]
    return y


def _banded(diag: FloatArray, off: FloatArray) -> FloatArray:
    ab = np.zeros((3, diag.size))
    ab[0, 1:] = off
    ab[1] = diag
    ab[2, :-1] = off
    return ab


def sturm_count(diag: FloatArray, off: FloatArray) -> int:
    """Number of negative eigenvalues of a symmetric tridiagonal matrix.

    Counts the negative pivots of its LDL^T factorization.
    """
    tiny = np.finfo(np.float64).tiny
    count = 0
    pivot = 1.0
    off_sq = np.concatenate(([0.0], off**2)).tolist()
    for d, e2 in zip(diag.tolist(), off_sq):
        pivot = d - e2 / pivot
        if pivot == 0.0:
            pivot = -tiny
        if pivot < 0.0:
            count += 1
    return count


# ===== Assembly =====
def graded_grid(N: int, tmax: float, tmin: float, start: float = 0.0) -> FloatArray:
    """{start} followed by N + 1 log-uniform nodes from start + tmin to start + tmax."""
    return start + np.concatenate(([0.0], np.geomspace(tmin, tmax, N + 1)))


def assemble_coefficients(
    grid: FloatArray,
    stiffness: RealFunction,
    mass: RealFunction,
    dirichlet: tuple[bool, bool] = (True, True),
    label: str = "",
    potential: RealFunction | None = None,
) -> DiscreteForm:
    """P1 forms int a(t) w'^2 dt and int b(t) w^2 dt, 3-point Gauss per element.

    ``potential`` adds int c(t) w^2 dt to the energy form.
    """
    grid = np.asarray(grid, dtype=np.float64)
    h = np.diff(grid)
    if np.any(h <= 0.0):
        raise DomainError("grid must be strictly increasing")
    points = grid[:-1, None] + h[:, None] * GAUSS_POINTS[None, :]
    phi_left = 1.0 - GAUSS_POINTS
    phi_right = GAUSS_POINTS

    def element_mass(coef: RealFunction) -> tuple[FloatArray, FloatArray, FloatArray]:
        with np.errstate(all="ignore"):
            values = np.asarray(coef(points), dtype=np.float64)
        values = np.where(np.isfinite(values), values, 0.0)
        weighted = values * GAUSS_WEIGHTS[None, :] * h[:, None]
        return (
            weighted @ phi_left**2,
            weighted @ (phi_left * phi_right),
            weighted @ phi_right**2,
        )

    def element_sum(ll: FloatArray, lr: FloatArray, rr: FloatArray) -> tuple[FloatArray, FloatArray]:
        diag = np.zeros(grid.size)
        diag[:-1] += ll
        diag[1:] += rr
        return diag, lr.copy()

    with np.errstate(all="ignore"):
        a_values = np.asarray(stiffness(points), dtype=np.float64)
    a_values = np.where(np.isfinite(a_values), a_values, 0.0)
    k = (a_values * GAUSS_WEIGHTS[None, :]).sum(axis=1) / h
    a_diag, a_off = element_sum(k, -k, k)
    if potential is not None:
        p_diag, p_off = element_sum(*element_mass(potential))
        a_diag, a_off = a_diag + p_diag, a_off + p_off
    b_diag, b_off = element_sum(*element_mass(mass))
    return DiscreteForm(
        grid=grid,
        a_diag=a_diag,
        a_off=a_off,
        b_diag=b_diag,
        b_off=b_off,
        dirichlet=dirichlet,
        label=label,
    )


def _insert_kink(grid: FloatArray, gauge: GaugeTransform) -> FloatArray:
    kink = float(gauge.forward(np.asarray(KINK_RADIUS)))
    if grid[0] < kink < grid[-1]:
        return np.union1d(grid, [kink])
    return grid


def assemble(
    mu: float,
    rhs_weight: PotentialSpec,
    gauge: GaugeTransform,
    N: int | None = None,
    tmax: float | None = None,
) -> DiscreteForm:
    """Energy form of the mu-deficit in ``gauge`` against the mass form of ``rhs_weight``.

    Parameters
    ----------
    mu : float
        Coupling constant; must be the one the gauge diagonalizes.
    rhs_weight : PotentialSpec
        Weight V of int V u^2 dx.
    gauge : GaugeTransform
        Frame of the discretization. Identity uses a uniform grid on r in [0, 1]
        with a natural condition at r = 0; the other frames use a graded grid
        on [t_lo, t_lo + tmax] with Dirichlet conditions at both ends.
    N : int, optional
        Number of graded intervals (default ``spec.N``).
    tmax : float, optional
        Artificial Dirichlet end (default ``spec.tmax``).

    Raises
    ------
    GaugeMismatch
        If ``gauge`` does not diagonalize the mu-deficit.
    """
    cfg = app_config.spec
    N = N or cfg.N
    if N < 16:
        raise DomainError(f"N must be at least 16, got N={N!r}")
    if not gauge.accepts(mu):
        raise GaugeMismatch(f"gauge {gauge.name!r} does not diagonalize mu={mu!r}")

    def mass(t: FloatArray) -> FloatArray:
        r2v = r2_potential(rhs_weight, gauge.s_of_t(t))
        return gauge.potential_density(t, np.ones_like(t), r2v)

    if gauge.tag is GaugeTag.IDENTITY:
        grid = np.linspace(0.0, 1.0, N + 1)
        leray = None
        if mu != 0.0:
            leray = lambda t: mu * gauge.leray_density(t, np.ones_like(t))  # noqa: E731
        dirichlet = (False, True)
        return assemble_coefficients(
            grid, gauge.energy_weight, mass, dirichlet, f"{rhs_weight.kind.value}@id", leray
        )
    start = gauge.t_domain[0]
    grid = _insert_kink(graded_grid(N, tmax or cfg.tmax, cfg.tmin, start), gauge)
    label = f"{rhs_weight.kind.value}@{gauge.name}(mu={mu!r})"
    return assemble_coefficients(grid, gauge.energy_weight, mass, (True, True), label)


# ===== Eigenvalues =====
def rayleigh_quotient(form: DiscreteForm, v: FloatArray) -> float:
    """v^T A v / v^T B v for a vector on the unknowns."""
    v = np.asarray(v, dtype=np.float64)
    num = float(v @ tridiagonal_matvec(*form.A, v))
    den = float(v @ tridiagonal_matvec(*form.B, v))
    if den <= 0.0:
        raise DomainError("vector has no mass")
    return num / den


def profile_vector(form: DiscreteForm, values: RealFunction) -> FloatArray:
    """Samples of a function of t at the unknowns of ``form``."""
    return np.asarray(values(form.grid[form.free]), dtype=np.float64)


def _residual(form: DiscreteForm, v: FloatArray, lam: float) -> tuple[float, float]:
    """||Av - lam Bv|| / ||Bv|| and the level rounding alone puts it at."""
    bv = tridiagonal_matvec(*form.B, v)
    r = tridiagonal_matvec(*form.A, v) - lam * bv
    scale = np.linalg.norm(bv)
    a_d, a_e = form.A
    b_d, b_e = form.B
    size = np.linalg.norm(tridiagonal_matvec(np.abs(a_d), np.abs(a_e), np.abs(v))) + abs(
        lam
    ) * np.linalg.norm(tridiagonal_matvec(np.abs(b_d), np.abs(b_e), np.abs(v)))
    floor = 64.0 * np.finfo(np.float64).eps * size / scale
    return float(np.linalg.norm(r) / scale), float(floor)


def min_rayleigh(
    form: DiscreteForm, tol: float | None = None, max_iter: int | None = None
) -> EigenResult:
    """Smallest generalized eigenvalue of (A, B) and its eigenvector.

    Raises
    ------
    NoConvergence
        If the residual ||Av - lam Bv|| / ||Bv|| stays above both ``tol`` and its
        rounding floor; the best iterate is attached as ``result``.
    """
    cfg = app_config.spec
    tol = tol or cfg.tol
    max_iter = max_iter or cfg.max_iter
    a_d, a_e = form.A
    b_d, b_e = form.B

    def count(sigma: float) -> int:
        return sturm_count(a_d - sigma * b_d, a_e - sigma * b_e)

    # Upper bound from a few unshifted inverse iterations.
    v = np.ones(form.N)
    lo = 0.0
    if count(0.0) > 0:
        lo = -1.0
        while count(lo) > 0:
            lo *= 2.0
    ab0 = _banded(a_d - lo * b_d, a_e - lo * b_e)
    for _ in range(3):
        v = solve_banded((1, 1), ab0, tridiagonal_matvec(b_d, b_e, v))
        v /= np.linalg.norm(v)
    hi = rayleigh_quotient(form, v)
    while count(hi) < 1:
        hi = hi + abs(hi) + 1.0
    while hi - lo > 0.1 * tol * max(abs(hi), 1e-300):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if count(mid) >= 1:
            hi = mid
        else:
            lo = mid

    # Inverse iteration just below the bracketed eigenvalue.
    shift = lo - tol * max(abs(hi), 1.0)
    ab = _banded(a_d - shift * b_d, a_e - shift * b_e)
    best = EigenResult(value=hi, vector=v, residual=math.inf, iterations=0, converged=False)
    for it in range(1, max_iter + 1):
        v = solve_banded((1, 1), ab, tridiagonal_matvec(b_d, b_e, v))
        v /= np.linalg.norm(v)
        lam = rayleigh_quotient(form, v)
        res, floor = _residual(form, v, lam)
        if res < best.residual:
            best = EigenResult(value=lam, vector=v, residual=res, iterations=it, converged=False)
        if res <= max(tol, floor):
            best = EigenResult(value=lam, vector=v, residual=res, iterations=it, converged=True)
            break
    vector = best.vector if best.vector.sum() >= 0.0 else -best.vector
    best = EigenResult(
        value=best.value,
        vector=vector,
        residual=best.residual,
        iterations=best.iterations,
        converged=best.converged,
    )
    logger.debug(f"{form.label!r}: lambda_min={best.value!r} residual={best.residual!r}")
    if not best.converged:
        raise NoConvergence(
            f"inverse iteration on {form.label!r} stopped at residual {best.residual!r}", best
        )
    return best


def _ladder_eigen(form: DiscreteForm, tol: float | None) -> EigenResult:
    """Best eigenpair of a ladder step; an unconverged one is kept and flagged."""
    try:
        return min_rayleigh(form, tol)
    except NoConvergence as err:
        logger.warning(str(err))
        return err.result


# ===== Constants =====
def leray_form(N: int, tmax: float | None = None) -> DiscreteForm:
    """Dirichlet form against int u^2 / (r^2 ln^2 r) dx in the frame t = -2 ln r."""
    return assemble(0.0, potential_from_name("leray"), gauge_b(0.0), N, tmax)


def _ladder(
    name: str,
    form_at: Callable[[int, float], DiscreteForm],
    N_ladder: Sequence[int],
    tol: float | None,
    truncation: bool,
) -> LadderReport:
    if not N_ladder or list(N_ladder) != sorted(set(N_ladder)) or N_ladder[0] < 16:
        raise DomainError(
            f"N_ladder must be increasing and start at 16 or more, got {list(N_ladder)!r}"
        )
    tmax = app_config.spec.tmax
    rows = []
    for N in N_ladder:
        eigen = _ladder_eigen(form_at(N, tmax), tol)
        rows.append(
            LadderRow(
                N=int(N), value=eigen.value, residual=eigen.residual, converged=eigen.converged
            )
        )
        logger.info(f"{name!r} constant at N={N!r}: {eigen.value!r}")
    values = [row.value for row in rows]
    nonincreasing = all(b <= a * (1.0 + 1e-9) for a, b in zip(values, values[1:]))
    truncation_value, truncation_converged = None, True
    if truncation:
        far = _ladder_eigen(form_at(N_ladder[-1], 2.0 * tmax), tol)
        truncation_value, truncation_converged = far.value, far.converged
    return LadderReport(
        name=name,
        rows=rows,
        nonincreasing=nonincreasing,
        truncation_value=truncation_value,
        truncation_converged=truncation_converged,
    )


def estimate_leray_constant(
    N_ladder: Sequence[int] = (256, 512, 1024, 2048, 4096),
    tol: float | None = None,
    truncation: bool = True,
) -> LadderReport:
    """Discrete Leray constants along nested graded grids.

    Each value bounds 1/4 from above. With ``truncation`` the finest value is
    recomputed with the artificial Dirichlet end moved to twice ``spec.tmax``.
    Steps whose inverse iteration missed ``tol`` stay in the report with
    ``converged=False``.
    """
    return _ladder("leray", leray_form, N_ladder, tol, truncation)


def remainder_form(
    variant: RatioVariant, N: int, tmax: float | None = None
) -> DiscreteForm:
    """Forms of the remainder inequalities.

    ``REMAINDER_L2`` is the Leray deficit in GaugeC against int u^2 W_2 dx;
    ``LOG_GRADIENT`` is 2 pi int t w'^2 dt against
    pi int w^2 / (s (1 + |ln s|)^2) dt with s = t / 2.
    """
    cfg = app_config.spec
    tmax = tmax or cfg.tmax
    match variant:
        case RatioVariant.REMAINDER_L2:
            gauge = gauge_c()
            grid = _insert_kink(graded_grid(N, tmax, cfg.tmin), gauge)

            # pi e^t s W_2 r^2 = 2 pi / ((1 - e^-t) (1 + |ln s|)^2), free of e^t.
            def mass(t: FloatArray) -> FloatArray:
                q = -np.expm1(-t)
                log_s = t + np.log(q) - math.log(2.0)
                return 2.0 * math.pi / (q * (1.0 + np.abs(log_s)) ** 2)

            return assemble_coefficients(grid, gauge.energy_weight, mass, label="remainder-l2")
        case RatioVariant.LOG_GRADIENT:
            gauge = gauge_b(-0.25)
            grid = _insert_kink(graded_grid(N, tmax, cfg.tmin), gauge)

            def mass(t: FloatArray) -> FloatArray:
                s = t / 2.0
                return math.pi / (s * (1.0 + np.abs(np.log(s))) ** 2)

            return assemble_coefficients(grid, gauge.energy_weight, mass, label="log-gradient")
        case _:
            raise DomainError(f"no discrete form for variant {variant.value!r}")


def estimate_remainder_constant(
    variant: RatioVariant = RatioVariant.REMAINDER_L2,
    N: int | None = None,
    tol: float | None = None,
) -> float:
    """Discrete infimum of the remainder quotient: an upper bound of the best constant.

    Raises
    ------
    NoConvergence
        If the inverse iteration misses ``tol``.
    """
    N = N or app_config.spec.N
    if N < 16:
        raise DomainError(f"N must be at least 16, got N={N!r}")
    value = min_rayleigh(remainder_form(variant, N), tol).value
    logger.info(f"{variant.value!r} constant at N={N!r}: {value!r}")
    return value


def estimate_remainder_ladder(
    variant: RatioVariant = RatioVariant.REMAINDER_L2,
    N_ladder: Sequence[int] = (256, 1024, 4096),
    tol: float | None = None,
    truncation: bool = True,
) -> LadderReport:
    """Remainder constants along a refinement ladder, as for the Leray constant."""
    return _ladder(
        variant.value,
        lambda N, tmax: remainder_form(variant, N, tmax),
        N_ladder,
        tol,
        truncation,
    )


def truncation_study(
    variant: RatioVariant, N: int | None = None, tol: float | None = None
) -> tuple[float, float]:
    """Remainder constant with the Dirichlet end at ``spec.tmax`` and at twice it."""
    N = N or app_config.spec.N
    tmax = app_config.spec.tmax
    near = min_rayleigh(remainder_form(variant, N, tmax), tol).value
    far = min_rayleigh(remainder_form(variant, N, 2.0 * tmax), tol).value
    return near, far


__all__: list[str] = [
    "DiscreteForm",
    "EigenResult",
    "assemble",
    "assemble_coefficients",
    "estimate_leray_constant",
    "estimate_remainder_constant",
    "estimate_remainder_ladder",
    "graded_grid",
    "leray_form",
    "min_rayleigh",
    "profile_vector",
    "rayleigh_quotient",
    "remainder_form",
    "sturm_count",
    "tridiagonal_matvec",
    "truncation_study",
]
