"""
Test configuration and fixtures for the lab.
"""

from collections.abc import Generator
from pathlib import Path

import pytest
from hypothesis import settings

from src.logic.profiles import moser_family, random_profile
from src.logic.weights import potential_from_name
from src.schemas import PotentialSpec
from src.schemas.profile import RadialProfile
from src.schemas.types import Smoothness

# Property tests evaluate integrals; per-example deadlines are meaningless here.
settings.register_profile("lab", deadline=None, max_examples=25)
settings.load_profile("lab")

NAMED_POTENTIALS: tuple[str, ...] = (
    "leray",
    "leray4",
    "leray-shift",
    "v1",
    "v2",
    "v3",
    "rem2",
    "remq:4",
    "iterlog:3",
    "const:1",
)


# ==========================================================
# ====================== POTENTIALS ========================
# ==========================================================
@pytest.fixture(scope="session")
def potentials() -> dict[str, PotentialSpec]:
    """Every potential addressable by name."""
    return {name: potential_from_name(name) for name in NAMED_POTENTIALS}


@pytest.fixture(scope="session")
def v3() -> PotentialSpec:
    return potential_from_name("v3")


# ==========================================================
# ======================= PROFILES =========================
# ==========================================================
@pytest.fixture(scope="session")
def moser_10() -> RadialProfile:
    """Moser family member n = 10 at mu = 0."""
    return moser_family(10, 0.0)


@pytest.fixture(scope="session")
def bump() -> RadialProfile:
    """Smooth nonnegative bump sum supported in [1e-3, 0.95]."""
    return random_profile(7, smoothness=Smoothness.SMOOTH_BUMP_SUM)


@pytest.fixture(scope="session")
def tent_profiles() -> list[RadialProfile]:
    """Seeded piecewise-linear profiles vanishing at both ends of their support."""
    return [random_profile(seed) for seed in range(5)]


# ==========================================================
# ======================== OUTPUT ==========================
# ==========================================================
@pytest.fixture(scope="function")
def output_dir(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> Generator[Path, None, None]:
    """Points LAB_OUTPUT_DIR at a temporary directory."""
    monkeypatch.setenv("LAB_OUTPUT_DIR", str(tmp_path))
    yield tmp_path
