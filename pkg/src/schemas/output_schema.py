import math
from typing import Self

from pydantic import Field, model_validator  # type: ignore

from src.schemas.input_schema import BaseSchema
from src.schemas.types import RatioFlag, RatioVariant, Verdict


class IterChain(BaseSchema):
    """Values X_1(r), ..., X_k(r) of the iterated logarithm chain."""

    r: float = Field(..., description="Evaluation radius.")
    values: tuple[float, ...] = Field(..., description="X_1 .. X_k.")

    @property
    def depth(self) -> int:
        return len(self.values)


class SpectralConstants(BaseSchema):
    """Constants attached to a coupling constant mu >= -1/4."""

    mu: float
    tau0: float = Field(..., description="Root (1 - sqrt(1 + 4 mu)) / 2.")
    sigma: float = Field(..., description="1 - 2 tau0 = sqrt(1 + 4 mu).")
    nu: float | None = Field(
        ..., description="Unit-energy scaling; undefined (None) at mu = -1/4."
    )
    m: float = Field(..., description="Sharp radial exponent 4 pi sqrt(1 + 4 mu).")

    @property
    def nu_defined(self) -> bool:
        return self.nu is not None


class IntegralResult(BaseSchema):
    """Value of a one-dimensional integral with its error estimate."""

    value: float
    error: float = Field(..., ge=0)
    converged: bool = True
    note: str | None = None


class LogIntegral(BaseSchema):
    """Natural log of a positive integral too large for direct evaluation."""

    log_value: float
    abs_error: float = Field(..., ge=0, description="Absolute error of log_value.")
    overflow: bool = Field(False, description="True when log_value is +inf.")
    note: str | None = None


class EnergyReport(BaseSchema):
    """Evaluated functionals of one profile."""

    mu: float
    dirichlet: float = Field(..., ge=0)
    potential_term: float
    deficit: float
    gauge_deficit: float = Field(
        ..., description="Deficit from the manifestly nonnegative gauge form."
    )
    moser_log: float | None = None
    abs_error_estimate: float = Field(..., ge=0)
    overflow: bool = False
    truncation_note: str | None = None

    @model_validator(mode="after")
    def check_affine_relation(self) -> Self:
        """The stored fields satisfy deficit = dirichlet + mu * potential_term."""
        if math.isfinite(self.dirichlet) and math.isfinite(self.potential_term):
            expected = self.dirichlet + self.mu * self.potential_term
            if self.deficit != expected:
                raise ValueError(
                    f"deficit {self.deficit!r} != dirichlet + mu * potential "
                    f"{expected!r}"
                )
        if self.moser_log is not None and self.moser_log < math.log(math.pi) - 1e-9:
            raise ValueError(f"moser_log {self.moser_log!r} is below ln(pi)")
        return self


class MazyaReport(BaseSchema):
    """Sup-product constant of a measure pair over a grid."""

    value: float = Field(..., ge=0)
    argmax: float = Field(..., description="Chart coordinate of the maximum.")
    argmax_radius: float = Field(..., description="Radius of the maximum (may be 0).")
    upper_bound: float = Field(
        ..., description="Upper end of the best-constant sandwich."
    )
    p: float
    q: float
    factors: tuple[float, ...] = Field(..., description="Product at each grid point.")


class RatioReport(BaseSchema):
    """LHS / RHS of an improved inequality."""

    variant: RatioVariant
    ratio: float
    lhs: float
    rhs: float
    flag: RatioFlag = RatioFlag.OK


class PolyaSzegoReport(BaseSchema):
    lhs: float = Field(..., description="Dirichlet energy of the rearrangement.")
    rhs: float = Field(..., description="Dirichlet energy of the profile.")
    holds: bool
    boundary_singular: bool = False
    radius: float = Field(..., description="Outer radius of the comparison.")


class InequalityCheck(BaseSchema):
    lhs: float
    rhs: float
    holds: bool


class ModeEnergyReport(BaseSchema):
    lhs: float
    rhs: float
    residual: float
    terms: tuple[float, ...] = Field(..., description="Per-mode energies.")


class LadderRow(BaseSchema):
    N: int
    value: float
    residual: float
    converged: bool = True


class LadderReport(BaseSchema):
    """Discrete constants along a refinement ladder."""

    name: str
    rows: list[LadderRow]
    nonincreasing: bool
    truncation_value: float | None = Field(
        None, description="Finest value recomputed with twice the cut-off."
    )
    truncation_converged: bool = True

    @property
    def converged(self) -> bool:
        """True when every eigenpair behind the report met its tolerance."""
        return self.truncation_converged and all(row.converged for row in self.rows)


class SweepResult(BaseSchema):
    """Moser functional table over a family index and an exponent."""

    family: str
    params: dict[str, float] = Field(default_factory=dict)
    axis1: list[float] = Field(..., description="Family index values (n or kappa).")
    axis2: list[float] = Field(..., description="Exponent values (alpha or p).")
    axis2_name: str = "alpha"
    table: list[list[float]] = Field(..., description="moser_log[i2][i1].")
    verdicts: list[Verdict]
    critical_estimate: float | None = None
    seed: int = 0

    @model_validator(mode="after")
    def check_shape(self) -> Self:
        """The table is |axis2| rows of |axis1| entries with one verdict per row."""
        if len(self.table) != len(self.axis2) or len(self.verdicts) != len(self.axis2):
            raise ValueError("table rows and verdicts must match axis2")
        if any(len(row) != len(self.axis1) for row in self.table):
            raise ValueError("table columns must match axis1")
        return self


class StressSummary(BaseSchema):
    """Minimum of a ratio over seeded random profiles."""

    variant: RatioVariant
    count: int
    min_ratio: float
    argmin_seed: int
    refined_ratio: float
    min_deficit: float | None = None
    flagged: int = 0
    red_flag: bool = False


class PotentialTable(BaseSchema):
    """Values of one potential on a set of radii."""

    name: str
    radii: list[float]
    values: list[float]


class ProfileSamples(BaseSchema):
    """A profile sampled on its nodes, in the frame it is carried in."""

    family: str
    frame: str
    gauge: str | None = None
    params: dict[str, float] = Field(default_factory=dict)
    nodes: list[float]
    values: list[float]
    derivative: list[float]


class RearrangementReport(BaseSchema):
    """Comparison inequalities of one profile against its rearrangement."""

    seed: int
    potential: str
    distribution_gap: float = Field(..., description="Largest level-set area gap.")
    polya_szego: PolyaSzegoReport
    hardy_littlewood: InequalityCheck

    @property
    def holds(self) -> bool:
        return self.polya_szego.holds and self.hardy_littlewood.holds


class SelftestCheck(BaseSchema):
    name: str
    value: float
    expected: float
    residual: float
    passed: bool


class SelftestReport(BaseSchema):
    checks: list[SelftestCheck]

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)


__all__: list[str] = [
    "EnergyReport",
    "InequalityCheck",
    "IntegralResult",
    "IterChain",
    "LadderReport",
    "LadderRow",
    "LogIntegral",
    "MazyaReport",
    "ModeEnergyReport",
    "PolyaSzegoReport",
    "PotentialTable",
    "ProfileSamples",
    "RatioReport",
    "RearrangementReport",
    "SelftestCheck",
    "SelftestReport",
    "SpectralConstants",
    "StressSummary",
    "SweepResult",
]
