from typing import Self

from pydantic import BaseModel, ConfigDict, Field, model_validator  # type: ignore
from pydantic.alias_generators import to_camel

from src.schemas.types import (
    Command,
    FamilyName,
    MoserConvention,
    OutputFormat,
    PotentialKind,
    RatioVariant,
    Smoothness,
    SweepFamily,
)


class BaseSchema(BaseModel):
    """Base schema class that inherits from Pydantic BaseModel.

    This class provides common configuration for all schema classes including
    camelCase alias generation, population by field name, and attribute mapping.
    """

    model_config: ConfigDict = ConfigDict(  # type: ignore
        alias_generator=to_camel,
        populate_by_name=True,
        from_attributes=True,
        arbitrary_types_allowed=True,
        strict=True,
    )


class PotentialSpec(BaseSchema):
    """A named singular weight V on radii in (0, 1).

    Parameters that only some kinds use (``q``, ``K``, ``c`` and the custom
    table) are validated against the kind.
    """

    model_config = ConfigDict(
        alias_generator=to_camel,
        populate_by_name=True,
        from_attributes=True,
        strict=True,
        frozen=True,
    )

    kind: PotentialKind = Field(..., description="Weight family.")
    q: float | None = Field(None, description="Exponent of the q-remainder weight.")
    K: int | None = Field(None, description="Depth of the iterated-log series.")
    c: float | None = Field(None, description="Value of a constant weight.")
    scale: float = Field(1.0, description="Multiplier applied to every value.", ge=0)
    abscissa: tuple[float, ...] | None = Field(
        None, description="Radii of a tabulated weight, strictly increasing."
    )
    table: tuple[float, ...] | None = Field(
        None, description="Values of a tabulated weight."
    )

    @model_validator(mode="after")
    def check_parameters(self) -> Self:
        """Validates the kind-specific parameters."""
        match self.kind:
            case PotentialKind.REMAINDER_Q:
                if self.q is None or not self.q > 2:
                    raise ValueError(f"remq requires q > 2, got q={self.q!r}")
            case PotentialKind.ITERATED_LOG_SERIES:
                if self.K is None or self.K < 2:
                    raise ValueError(f"iterlog requires K >= 2, got K={self.K!r}")
            case PotentialKind.CONSTANT:
                if self.c is None or self.c < 0:
                    raise ValueError(f"const requires c >= 0, got c={self.c!r}")
            case PotentialKind.CUSTOM:
                self._check_table()
        return self

    def _check_table(self) -> None:
        if self.abscissa is None or self.table is None:
            raise ValueError("custom weights need both abscissa and table")
        if len(self.abscissa) != len(self.table) or len(self.abscissa) < 2:
            raise ValueError(
                f"abscissa and table must have equal length >= 2, got "
                f"{len(self.abscissa)!r} and {len(self.table)!r}"
            )
        if any(b <= a for a, b in zip(self.abscissa, self.abscissa[1:])):
            raise ValueError("abscissa must be strictly increasing")
        if self.abscissa[0] <= 0 or self.abscissa[-1] >= 1:
            raise ValueError(
                f"abscissa must lie inside (0, 1), got "
                f"[{self.abscissa[0]!r}, {self.abscissa[-1]!r}]"
            )
        if any(v < 0 for v in self.table):
            raise ValueError("tabulated weights must be nonnegative")

    @property
    def domain(self) -> tuple[float, float]:
        """Open interval of radii on which the weight is defined."""
        if self.kind is PotentialKind.CUSTOM:
            return (self.abscissa[0], self.abscissa[-1])  # type: ignore[index]
        return (0.0, 1.0)

    @property
    def closed_at_one(self) -> bool:
        """Whether r = 1 is an admissible evaluation point."""
        return self.kind in (PotentialKind.PSARADAKIS_SPECTOR, PotentialKind.CONSTANT)

    @property
    def name(self) -> str:
        """Stable string name, the inverse of ``potential_from_name``."""
        match self.kind:
            case PotentialKind.REMAINDER_Q:
                return f"remq:{self.q!r}"
            case PotentialKind.ITERATED_LOG_SERIES:
                return f"iterlog:{self.K}"
            case PotentialKind.CONSTANT:
                return f"const:{self.c!r}"
            case _:
                return self.kind.value


class RunConfig(BaseModel):
    """Resolved parameters of one CLI invocation.

    Unknown keys are rejected. Precedence when building it is
    flags > config file > these defaults.
    """

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    command: Command | None = Field(None, description="Subcommand that ran.")
    action: str | None = Field(None, description="Sub-action (eval, table, gen).")
    potential: str = Field("leray", description="Potential name.")
    family: FamilyName = Field(FamilyName.MOSER, description="Profile family.")
    sweep_family: SweepFamily = Field(
        SweepFamily.MOSER, description="Family of the critical exponent search."
    )
    gauge: str = Field("gaugeB", description="Gauge name.")
    variant: RatioVariant = Field(
        RatioVariant.REMAINDER_L2, description="Inequality variant."
    )
    smoothness: Smoothness = Field(
        Smoothness.SMOOTH_BUMP_SUM, description="Random profile shape class."
    )
    convention: MoserConvention = Field(
        MoserConvention.EXACT, description="Power convention in the GaugeC frame."
    )
    r: float | None = Field(None, description="Radius for point evaluations.")
    r_min: float = Field(1e-6, description="Smallest radius of potential tables.")
    r_max: float = Field(0.99, description="Largest radius of potential tables.")
    mu: float = Field(0.0, description="Coupling constant mu >= -1/4.")
    alpha: float | None = Field(None, description="Moser exponent alpha > 0.")
    alphas: list[float] | None = Field(None, description="Exponent axis of sweeps.")
    p: float = Field(2.0, description="Power p > 0 in exp(alpha |u|^p).")
    ps: list[float] | None = Field(None, description="Power axis of sweeps.")
    q: float = Field(4.0, description="Exponent q of the L^q variants.")
    K: int = Field(3, description="Depth of the iterated-log series.")
    beta: float = Field(1.0, description="Constant of the measure pairs.")
    n: int = Field(10, description="Family index n.")
    ns: list[int] | None = Field(None, description="Family index axis of sweeps.")
    n_max: int | None = Field(None, description="Largest n of the critical search.")
    kappa: float = Field(10.0, description="Cutoff length kappa > 4.")
    kappas: list[float] | None = Field(None, description="Kappa axis of sweeps.")
    t1: float = Field(3.0, description="Switch point t1 > 2.")
    tau0: float = Field(0.0, description="Gauge exponent tau0 < 1/2.")
    offset: float = Field(0.5, description="Distance of the bump centre from 0.")
    N: int | None = Field(None, description="Number of unknowns.")
    N_ladder: list[int] | None = Field(None, description="Refinement ladder.")
    M: int = Field(8, description="Highest angular mode.")
    count: int = Field(100, description="Number of random profiles.")
    seed: int | None = Field(None, description="Root seed.")
    tol: float | None = Field(None, description="Tolerance override.")
    jobs: int | None = Field(None, description="Worker threads.")
    out: str | None = Field(None, description="Output path.")
    format: OutputFormat = Field(OutputFormat.JSON, description="Output format.")
