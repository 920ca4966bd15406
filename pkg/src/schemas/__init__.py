from src.schemas.input_schema import BaseSchema, PotentialSpec, RunConfig
from src.schemas.output_schema import (
    EnergyReport,
    InequalityCheck,
    IntegralResult,
    IterChain,
    LadderReport,
    LadderRow,
    LogIntegral,
    MazyaReport,
    ModeEnergyReport,
    PolyaSzegoReport,
    PotentialTable,
    ProfileSamples,
    RatioReport,
    RearrangementReport,
    SelftestCheck,
    SelftestReport,
    SpectralConstants,
    StressSummary,
    SweepResult,
)

__all__: list[str] = [
    "BaseSchema",
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
    "PotentialSpec",
    "PotentialTable",
    "ProfileSamples",
    "RatioReport",
    "RearrangementReport",
    "RunConfig",
    "SelftestCheck",
    "SelftestReport",
    "SpectralConstants",
    "StressSummary",
    "SweepResult",
]
