"""
Command-line front end: builds a RunConfig, dispatches one experiment and
persists its result.

Usage: hardy-moser-lab <command> [options]
       uv run -m scripts.run_lab <command> [options]

Exit codes: 0 success, 1 domain or configuration error, 2 numerical
non-convergence, 3 red-flag inequality violation.
"""

import argparse
import json
import logging
import math
import sys
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np
from pydantic import BaseModel, ValidationError  # type: ignore
from rich.console import Console
from rich.table import Table

from src import create_logger, set_log_level
from src.config import app_config
from src.config.settings import refresh_settings
from src.exceptions import (
    BracketFailure,
    DivergentFactor,
    IoError,
    LabError,
    NoConvergence,
    OverflowSignal,
)
from src.logic.profiles import (
    h0_profile,
    moser_family,
    plateau_family,
    random_profile,
    zeta_t1,
)
from src.logic.quadrature import (
    boundary_pair,
    deficit,
    gauge_energy,
    integrate,
    j_functional,
    mazya_B,
    moser,
    remainder_ratio,
    small_radius_pair,
)
from src.logic.spectral import estimate_leray_constant, estimate_remainder_ladder
from src.logic.sweeps import (
    critical_alpha_search,
    family_profile,
    inequality_stress,
    moser_sweep,
    nonradial_gap_demo,
    quarter_case_sweep,
)
from src.logic.symmetry import (
    check_hardy_littlewood,
    check_polya_szego,
    equimeasurability_residual,
    mode_energy_identity,
)
from src.logic.transforms import constants_for
from src.logic.weights import KINK_RADIUS, eval_potential, potential_from_name
from src.schemas import (
    LadderReport,
    PotentialTable,
    ProfileSamples,
    RatioReport,
    RearrangementReport,
    RunConfig,
    SelftestCheck,
    SelftestReport,
    StressSummary,
    SweepResult,
)
from src.schemas.profile import RadialProfile
from src.schemas.types import (
    Command,
    FamilyName,
    FloatArray,
    MoserConvention,
    OutputFormat,
    RatioVariant,
    Smoothness,
    SweepFamily,
)
from src.utilities.serialization import emit

logger = create_logger(name="cli")
console = Console()

EXIT_OK: int = 0
EXIT_DOMAIN: int = 1
EXIT_NUMERICAL: int = 2
EXIT_RED_FLAG: int = 3

# Checked in order; the first matching class decides the exit code.
_EXIT_CODES: tuple[tuple[type[BaseException], int], ...] = (
    (NoConvergence, EXIT_NUMERICAL),
    (BracketFailure, EXIT_NUMERICAL),
    (DivergentFactor, EXIT_NUMERICAL),
    (OverflowSignal, EXIT_NUMERICAL),
    (LabError, EXIT_DOMAIN),
    (ValidationError, EXIT_DOMAIN),
)

# Lowest precedence layer, below the config file and the flags.
_COMMAND_DEFAULTS: dict[Command, dict[str, Any]] = {
    Command.REARRANGE: {"potential": "v3", "smoothness": Smoothness.PIECEWISE_LINEAR},
    Command.NONRADIAL_DEMO: {"mu": 0.75},
    Command.MAZYA_B: {"q": 2.0, "count": 200},
}


class UsageError(Exception):
    """Malformed command line."""


class LabArgumentParser(argparse.ArgumentParser):
    """ArgumentParser that raises instead of exiting on malformed flags."""

    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


@dataclass(frozen=True)
class Outcome:
    """Result of one subcommand."""

    result: BaseModel
    summary: str | None = None
    red_flag: bool = False
    unconverged: bool = False
    write: bool = True


# ===== Argument parsing =====
def _common_flags() -> argparse.ArgumentParser:
    common = LabArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--config", dest="config_path", help="JSON file with RunConfig keys.")
    common.add_argument("--out", help="Result file (default: LAB_OUTPUT_DIR/<command>.<format>).")
    common.add_argument("--format", choices=[f.value for f in OutputFormat])
    common.add_argument("--jobs", type=int, help="Worker threads for sweeps.")
    common.add_argument("--seed", type=int, help="Root seed of random profiles.")
    common.add_argument("-v", "--verbose", action="store_true", help="Debug logging.")
    common.add_argument("-q", "--quiet", action="store_true", help="Warnings only.")
    return common


def _floats(parser: argparse.ArgumentParser, *names: str) -> None:
    for name in names:
        parser.add_argument(f"--{name}", type=float)


def _float_lists(parser: argparse.ArgumentParser, *names: str) -> None:
    for name in names:
        parser.add_argument(f"--{name}", type=float, nargs="+")


def _family_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--family", choices=[f.value for f in FamilyName])
    parser.add_argument("--n", type=int, help="Family index n.")
    parser.add_argument("--smoothness", choices=[s.value for s in Smoothness])
    _floats(parser, "mu", "kappa", "t1", "tau0", "offset")


def build_parser() -> argparse.ArgumentParser:
    """Parser of every subcommand; all flags default to absent."""
    common = _common_flags()
    parser = LabArgumentParser(
        prog="hardy-moser-lab",
        description="Numerical lab for weighted Hardy-Leray inequalities and Moser functionals.",
        parents=[common],
        argument_default=argparse.SUPPRESS,
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    def command(name: Command, help_text: str) -> argparse.ArgumentParser:
        return sub.add_parser(
            name.value, help=help_text, parents=[common], argument_default=argparse.SUPPRESS
        )

    p = command(Command.POTENTIAL, "Evaluate or tabulate a potential.")
    p.add_argument("action", choices=["eval", "table"])
    p.add_argument("--name", dest="potential", help="leray, v3, remq:<q>, iterlog:<K>, ...")
    _floats(p, "r", "r-min", "r-max")
    p.add_argument("--count", type=int)

    p = command(Command.FAMILY, "Sample a profile family (axis2 holds the derivative).")
    p.add_argument("action", choices=["gen"])
    p.add_argument("--name", dest="family", choices=[f.value for f in FamilyName])
    p.add_argument("--n", type=int)
    p.add_argument("--smoothness", choices=[s.value for s in Smoothness])
    _floats(p, "mu", "kappa", "t1", "tau0", "offset")

    p = command(Command.ENERGY, "Dirichlet energy, deficit and optionally the Moser functional.")
    _family_flags(p)
    p.add_argument("--potential")
    _floats(p, "alpha", "p", "tol")
    p.add_argument("--convention", choices=[c.value for c in MoserConvention])

    p = command(Command.RATIO, "Remainder ratio of one random profile, or a stress run.")
    p.add_argument("action", nargs="?", choices=["eval", "stress"])
    p.add_argument("--variant", choices=[v.value for v in RatioVariant])
    p.add_argument("--smoothness", choices=[s.value for s in Smoothness])
    p.add_argument("--q", type=float)
    p.add_argument("--K", type=int)
    p.add_argument("--count", type=int)

    p = command(Command.MAZYA_B, "B-constant of a one-dimensional measure pair.")
    p.add_argument("action", nargs="?", choices=["small", "boundary"])
    _floats(p, "beta", "q")
    p.add_argument("--count", type=int, help="Grid points.")

    p = command(Command.LERAY_CONSTANT, "Discrete Leray constants along a refinement ladder.")
    p.add_argument("--N-ladder", type=int, nargs="+")
    _floats(p, "tol")

    p = command(Command.REMAINDER_CONSTANT, "Discrete remainder constants along a ladder.")
    p.add_argument(
        "--variant",
        choices=[RatioVariant.REMAINDER_L2.value, RatioVariant.LOG_GRADIENT.value],
    )
    p.add_argument("--N-ladder", type=int, nargs="+")
    _floats(p, "tol")

    p = command(Command.MOSER_SWEEP, "Moser functional table over a family.")
    p.add_argument("--family", choices=[f.value for f in FamilyName])
    p.add_argument("--ns", type=int, nargs="+")
    _float_lists(p, "alphas", "kappas")
    _floats(p, "mu", "p", "offset")
    p.add_argument("--convention", choices=[c.value for c in MoserConvention])

    p = command(Command.CRITICAL_ALPHA, "Bisection for the radial critical exponent.")
    p.add_argument("--sweep-family", choices=[f.value for f in SweepFamily])
    p.add_argument("--n-max", type=int)
    _floats(p, "mu", "tol")

    p = command(Command.QUARTER_SWEEP, "Kappa-family verdicts at mu = -1/4.")
    _float_lists(p, "ps", "alphas", "kappas")
    p.add_argument("--convention", choices=[c.value for c in MoserConvention])

    p = command(Command.NONRADIAL_DEMO, "Off-center plateau family on the unit sphere of the norm.")
    p.add_argument("--ns", type=int, nargs="+")
    _float_lists(p, "alphas")
    _floats(p, "mu", "offset")
    p.add_argument("--potential")

    p = command(Command.REARRANGE, "Rearrangement inequalities of one random profile.")
    p.add_argument("--potential")
    p.add_argument("--smoothness", choices=[s.value for s in Smoothness])
    _floats(p, "q")

    p = command(Command.MODES, "Energy identity of the angular mode decomposition.")
    p.add_argument("--M", type=int)

    command(Command.SELFTEST, "Run the closed-form identity checks.")
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Merges command defaults, the JSON config file and the flags, in rising precedence."""
    flags = {k: v for k, v in vars(args).items() if k not in {"config_path", "verbose", "quiet"}}
    command = Command(flags["command"])
    layered: dict[str, Any] = dict(_COMMAND_DEFAULTS.get(command, {}))
    if path := getattr(args, "config_path", None):
        try:
            document = json.loads(Path(path).read_text(encoding="utf-8"))
        except OSError as e:
            raise IoError(f"cannot read config file {path!r}: {e}") from e
        except json.JSONDecodeError as e:
            raise UsageError(f"config file {path!r} is not valid JSON: {e}") from e
        if not isinstance(document, dict):
            raise UsageError(f"config file {path!r} must hold a JSON object")
        layered.update(document)
    layered.update(flags)
    return RunConfig.model_validate(layered)


# ===== Helpers =====
def _jobs(cfg: RunConfig) -> int:
    return cfg.jobs or app_config.sweep.jobs


def _seed(cfg: RunConfig) -> int:
    return app_config.sweep.seed if cfg.seed is None else cfg.seed


def _index(cfg: RunConfig) -> float:
    match cfg.family:
        case FamilyName.WKAPPA:
            return cfg.kappa
        case FamilyName.ZETA_T1:
            return cfg.t1
        case _:
            return float(cfg.n)


def _profile(cfg: RunConfig) -> RadialProfile:
    if cfg.family is FamilyName.RANDOM:
        return random_profile(_seed(cfg), smoothness=cfg.smoothness)
    return family_profile(cfg.family, _index(cfg), cfg.mu, tau0=cfg.tau0, offset=cfg.offset)


def _samples(u: RadialProfile) -> ProfileSamples:
    nodes = np.asarray(u.nodes, dtype=np.float64)
    return ProfileSamples(
        family=u.family or "profile",
        frame=u.frame.value,
        gauge=None if u.gauge is None else u.gauge.name,
        params={k: float(v) for k, v in u.params.items()},
        nodes=nodes.tolist(),
        values=np.asarray(u(nodes), dtype=np.float64).tolist(),
        derivative=np.asarray(u.derivative(nodes), dtype=np.float64).tolist(),
    )


def _default_alphas(mu: float) -> list[float]:
    m = constants_for(mu).m if mu > -0.25 else 4.0 * math.pi
    return [0.8 * m, 1.2 * m]


def _stress_radius(variant: RatioVariant) -> float:
    return 0.9 * KINK_RADIUS if variant is RatioVariant.REMAINDER_LQ_BALL else 0.95


# ===== Subcommands =====
def _potential(cfg: RunConfig) -> Outcome:
    spec = potential_from_name(cfg.potential)
    if cfg.action == "eval":
        if cfg.r is None:
            raise UsageError("potential eval needs --r")
        value = float(eval_potential(spec, cfg.r))
        table = PotentialTable(name=spec.name, radii=[cfg.r], values=[value])
        return Outcome(table, summary=f"{spec.name}({cfg.r!r}) = {value!r}", write=False)
    radii = np.geomspace(cfg.r_min, cfg.r_max, cfg.count)
    values = np.asarray(eval_potential(spec, radii), dtype=np.float64)
    return Outcome(PotentialTable(name=spec.name, radii=radii.tolist(), values=values.tolist()))


def _family(cfg: RunConfig) -> Outcome:
    u = _profile(cfg)
    return Outcome(_samples(u), summary=f"{u.family!r}: {len(u.nodes)} nodes")


def _energy(cfg: RunConfig) -> Outcome:
    u = _profile(cfg)
    spec = potential_from_name(cfg.potential)
    if cfg.alpha is None:
        report = deficit(u, cfg.mu, spec, cfg.tol)
    else:
        report = moser(u, cfg.alpha, cfg.p, spec, cfg.mu, cfg.convention, cfg.tol)
    return Outcome(report, summary=f"deficit = {report.deficit!r}")


def _ratio(cfg: RunConfig) -> Outcome:
    radius = _stress_radius(cfg.variant)
    if cfg.action == "eval":
        u = random_profile(_seed(cfg), smoothness=cfg.smoothness, outer_radius=radius)
        report: RatioReport = remainder_ratio(u, cfg.variant, q=cfg.q, K=cfg.K, tol=cfg.tol)
        negative = report.ratio < 0.0 and cfg.variant is not RatioVariant.LOG_GRADIENT
        return Outcome(report, summary=f"ratio = {report.ratio!r}", red_flag=negative)
    summary: StressSummary = inequality_stress(
        cfg.variant,
        cfg.count,
        _seed(cfg),
        q=cfg.q,
        K=cfg.K,
        outer_radius=radius,
        smoothness=cfg.smoothness,
        jobs=_jobs(cfg),
    )
    return Outcome(
        summary,
        summary=f"min ratio {summary.min_ratio!r} at seed {summary.argmin_seed!r}",
        red_flag=summary.red_flag,
    )


def _mazya(cfg: RunConfig) -> Outcome:
    make = boundary_pair if cfg.action == "boundary" else small_radius_pair
    pair = make(cfg.beta, cfg.q)
    grid = pair.y_min + np.geomspace(1e-3, 1e3, cfg.count)
    report = mazya_B(pair, grid.tolist(), cfg.tol)
    return Outcome(report, summary=f"B = {report.value!r} <= {report.upper_bound!r}")


def _ladder(report: LadderReport) -> Outcome:
    finest = report.rows[-1]
    return Outcome(
        report,
        summary=f"{report.name}: {finest.value!r} at N={finest.N!r}",
        unconverged=not report.converged,
    )


def _leray(cfg: RunConfig) -> Outcome:
    ladder = cfg.N_ladder or [256, 512, 1024, 2048, app_config.spec.N]
    return _ladder(estimate_leray_constant(ladder, cfg.tol))


def _remainder(cfg: RunConfig) -> Outcome:
    ladder = cfg.N_ladder or [256, 1024, app_config.spec.N]
    return _ladder(estimate_remainder_ladder(cfg.variant, ladder, cfg.tol))


def _sweep_summary(result: SweepResult) -> str:
    verdicts = ", ".join(
        f"{result.axis2_name}={a!r}: {v.value}" for a, v in zip(result.axis2, result.verdicts)
    )
    return f"{result.family}: {verdicts}"


def _moser_sweep(cfg: RunConfig) -> Outcome:
    top = cfg.n_max or app_config.sweep.n_max
    if cfg.family is FamilyName.WKAPPA:
        k_top = app_config.sweep.kappa_max
        index: Sequence[float] = cfg.kappas or [k_top / 8.0, k_top / 4.0, k_top / 2.0, k_top]
    else:
        index = [float(n) for n in (cfg.ns or [top // 8, top // 4, top // 2, top])]
    result = moser_sweep(
        cfg.family,
        cfg.mu,
        index,
        cfg.alphas or _default_alphas(cfg.mu),
        cfg.p,
        cfg.convention,
        _jobs(cfg),
        tau0=cfg.tau0,
        offset=cfg.offset,
    )
    return Outcome(result, summary=_sweep_summary(result))


def _critical(cfg: RunConfig) -> Outcome:
    result = critical_alpha_search(cfg.mu, cfg.sweep_family, cfg.n_max, tol=cfg.tol)
    return Outcome(
        result,
        summary=(
            f"critical alpha ~ {result.critical_estimate!r} "
            f"(4 pi sqrt(1 + 4 mu) = {constants_for(cfg.mu).m!r})"
        ),
    )


def _quarter(cfg: RunConfig) -> Outcome:
    result = quarter_case_sweep(
        cfg.ps or [0.5, 2.0],
        cfg.alphas or [1.0, 10.0],
        cfg.kappas,
        cfg.convention,
        _jobs(cfg),
    )
    return Outcome(result, summary=_sweep_summary(result))


def _nonradial(cfg: RunConfig) -> Outcome:
    alphas = cfg.alphas or [0.8 * 4.0 * math.pi, 1.2 * 4.0 * math.pi]
    result = nonradial_gap_demo(
        cfg.mu,
        alphas,
        potential_from_name(cfg.potential),
        offset=cfg.offset,
        ns=cfg.ns,
        jobs=_jobs(cfg),
    )
    return Outcome(result, summary=_sweep_summary(result))


def _rearrange(cfg: RunConfig) -> Outcome:
    seed = _seed(cfg)
    u = random_profile(seed, smoothness=cfg.smoothness)
    spec = potential_from_name(cfg.potential)
    report = RearrangementReport(
        seed=seed,
        potential=spec.name,
        distribution_gap=equimeasurability_residual(u),
        polya_szego=check_polya_szego(u),
        hardy_littlewood=check_hardy_littlewood(u, spec, q=cfg.q),
    )
    return Outcome(
        report,
        summary=f"Polya-Szego and Hardy-Littlewood hold: {report.holds!r}",
        red_flag=not report.holds,
    )


def _mode_demo(r: FloatArray, theta: FloatArray) -> FloatArray:
    return r * (1.0 - r) * np.cos(theta) / math.sqrt(math.pi)


def _modes(cfg: RunConfig) -> Outcome:
    report = mode_energy_identity(_mode_demo, cfg.M)
    return Outcome(report, summary=f"energy {report.lhs!r}, residual {report.residual!r}")


def _check(name: str, value: float, expected: float, tol: float) -> SelftestCheck:
    residual = abs(value - expected) / max(1.0, abs(expected))
    return SelftestCheck(
        name=name,
        value=float(value),
        expected=float(expected),
        residual=float(residual),
        passed=bool(residual <= tol),
    )


def run_selftest() -> SelftestReport:
    """Closed-form identities of the lab, each against its exact value."""
    checks = [
        _check("m_mu at mu=0", constants_for(0.0).m, 4.0 * math.pi, 1e-13),
        _check("v3 at r=1", float(eval_potential(potential_from_name("v3"), 1.0)), 0.25, 1e-13),
        _check("int_0^1 r dr", integrate(lambda r: r, 0.0, 1.0).value, 0.5, 1e-14),
        _check(
            "int_2^inf exp(-2s) ds",
            integrate(lambda s: np.exp(-2.0 * s), 2.0, math.inf).value,
            math.exp(-4.0) / 2.0,
            1e-10,
        ),
    ]
    for t1, tau0 in ((3.0, 0.0), (10.0, -0.5), (100.0, 0.25)):
        checks.append(
            _check(f"J of zeta (t1={t1!r}, tau0={tau0!r})", j_functional(zeta_t1(t1, tau0)), 1.0, 1e-8)
        )
    for n, mu in ((10, 0.0), (100, 0.75), (1000, -0.1875)):
        checks.append(
            _check(f"moser energy (n={n!r}, mu={mu!r})", gauge_energy(moser_family(n, mu)), 1.0, 1e-6)
        )
    for n in (8, 50, 200):
        checks.append(_check(f"plateau energy (n={n!r})", gauge_energy(plateau_family(n)), 1.0, 1e-8))
    h0 = h0_profile()
    checks.append(_check("h0 at r=1/4", float(h0(0.25)), math.sqrt(math.log(4.0)), 1e-12))
    modes = mode_energy_identity(_mode_demo, 4)
    checks.append(_check("mode energy identity", modes.residual, 0.0, 1e-6))
    return SelftestReport(checks=checks)


def _selftest(cfg: RunConfig) -> Outcome:
    report = run_selftest()
    failed = [c.name for c in report.checks if not c.passed]
    summary = "all identities hold" if not failed else f"failed: {failed!r}"
    return Outcome(report, summary=summary, red_flag=bool(failed), write=cfg.out is not None)


_HANDLERS: dict[Command, Callable[[RunConfig], Outcome]] = {
    Command.POTENTIAL: _potential,
    Command.FAMILY: _family,
    Command.ENERGY: _energy,
    Command.RATIO: _ratio,
    Command.MAZYA_B: _mazya,
    Command.LERAY_CONSTANT: _leray,
    Command.REMAINDER_CONSTANT: _remainder,
    Command.MOSER_SWEEP: _moser_sweep,
    Command.CRITICAL_ALPHA: _critical,
    Command.QUARTER_SWEEP: _quarter,
    Command.NONRADIAL_DEMO: _nonradial,
    Command.REARRANGE: _rearrange,
    Command.MODES: _modes,
    Command.SELFTEST: _selftest,
}


# ===== Output =====
def _fmt(x: Any) -> str:
    return repr(x) if isinstance(x, float) else str(getattr(x, "value", x))


def render(result: BaseModel, title: str) -> None:
    """Prints a result as a rich table."""
    table = Table(title=title)
    match result:
        case SweepResult():
            table.add_column(result.axis2_name)
            for a1 in result.axis1:
                table.add_column(f"{a1:g}", justify="right")
            table.add_column("verdict")
            for a2, row, verdict in zip(result.axis2, result.table, result.verdicts):
                table.add_row(f"{a2:g}", *(f"{v:.6g}" for v in row), verdict.value)
        case LadderReport():
            for name in ("N", "value", "residual"):
                table.add_column(name, justify="right")
            for row in result.rows:
                table.add_row(str(row.N), _fmt(row.value), f"{row.residual:.2e}")
        case SelftestReport():
            for name in ("check", "value", "expected", "residual", "ok"):
                table.add_column(name)
            for c in result.checks:
                table.add_row(c.name, _fmt(c.value), _fmt(c.expected), f"{c.residual:.2e}", str(c.passed))
        case _:
            table.add_column("field")
            table.add_column("value", justify="right")
            for name, value in result:
                if isinstance(value, (list, tuple)) and len(value) > 8:
                    value = f"[{len(value)} values]"
                table.add_row(name, _fmt(value))
    console.print(table)


def _target(cfg: RunConfig, command: Command) -> Path:
    if cfg.out is not None:
        return Path(cfg.out)
    stem = command.value if cfg.action is None else f"{command.value}-{cfg.action}"
    return refresh_settings().output_dir / f"{stem}.{cfg.format.value}"


def _exit_code(error: BaseException) -> int:
    for kind, code in _EXIT_CODES:
        if isinstance(error, kind):
            return code
    raise error


def run(argv: Sequence[str] | None = None) -> int:
    """Runs one subcommand and returns its exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(list(sys.argv[1:] if argv is None else argv))
    except UsageError as e:
        console.print(str(e), markup=False, highlight=False)
        return EXIT_DOMAIN
    except SystemExit as e:
        # --help
        return int(e.code or 0)

    if getattr(args, "verbose", False):
        set_log_level(logging.DEBUG)
    elif getattr(args, "quiet", False):
        set_log_level(logging.WARNING)
    else:
        set_log_level(refresh_settings().log_level)

    command = Command(args.command)
    try:
        cfg = resolve_config(args)
    except (UsageError, IoError, ValidationError) as e:
        console.print(f"error: {e}", markup=False, highlight=False)
        return EXIT_DOMAIN

    try:
        outcome = _HANDLERS[command](cfg)
    except UsageError as e:
        console.print(f"error: {e}", markup=False, highlight=False)
        return EXIT_DOMAIN
    except BracketFailure as e:
        logger.error(f"{command.value}: {e}")
        if e.table is not None:
            emit(e.table, cfg.format, _target(cfg, command), cfg)
        return EXIT_NUMERICAL
    except (LabError, ValidationError) as e:
        logger.error(f"{command.value}: {e}")
        console.print(f"error: {e}", markup=False, highlight=False)
        return _exit_code(e)

    render(outcome.result, title=command.value)
    if outcome.summary:
        console.print(outcome.summary, markup=False, highlight=False)
    if outcome.write:
        try:
            path = emit(outcome.result, cfg.format, _target(cfg, command), cfg)
        except IoError as e:
            console.print(f"error: {e}", markup=False, highlight=False)
            return EXIT_DOMAIN
        console.print(f"wrote {path}", markup=False, highlight=False)
    if outcome.unconverged:
        logger.error(f"{command.value}: some eigenpairs missed their tolerance")
        return EXIT_NUMERICAL
    if outcome.red_flag:
        logger.error(f"{command.value}: inequality violation")
        return EXIT_RED_FLAG
    return EXIT_OK


def main() -> None:
    """Console-script entry point."""
    sys.exit(run())


if __name__ == "__main__":
    main()
