from __future__ import annotations

from pathlib import Path

from omegaconf import DictConfig, OmegaConf
from pydantic import Field

from src import PACKAGE_PATH
from src.schemas import BaseSchema


class QuadratureConfig(BaseSchema):
    """Tolerances of the one-dimensional integrators."""

    tol: float = Field(1e-10, description="Relative tolerance per integral.", gt=0)
    max_depth: int = Field(
        40, description="Maximum bisection depth of the adaptive rules.", ge=1
    )
    tmax: float = Field(
        200.0, description="First truncation point of infinite t-ranges.", gt=0
    )
    gauss_nodes: int = Field(
        20, description="Gauss-Legendre nodes per panel in the log-domain rule.", ge=2
    )
    decay_cutoff: float = Field(
        1e-16,
        description="Relative size of a dropped tail below which truncation is accepted.",
        gt=0,
    )


class SpectralConfig(BaseSchema):
    """Discretization of the quadratic forms."""

    N: int = Field(4096, description="Number of unknowns.", ge=16)
    tol: float = Field(1e-10, description="Relative eigen-residual tolerance.", gt=0)
    tmax: float = Field(200.0, description="Artificial Dirichlet end of t-grids.", gt=0)
    tmin: float = Field(
        1e-10, description="First positive node of the graded t-grids.", gt=0
    )
    max_iter: int = Field(200, description="Inverse iteration cap.", ge=1)


class SweepConfig(BaseSchema):
    """Defaults of the experiment sweeps."""

    n_max: int = Field(200, description="Largest family index n.", ge=4)
    kappa_max: float = Field(160.0, description="Largest cutoff length kappa.", gt=4)
    growth_ratio: float = Field(
        1.5,
        description="Top-octave growth factor separating bounded from growing.",
        gt=1,
    )
    seed: int = Field(20240917, description="Root seed of random profiles.", ge=0)
    jobs: int = Field(1, description="Worker threads per sweep.", ge=1)


class ProfilesConfig(BaseSchema):
    """Defaults of the profile families."""

    epsilon: float = Field(
        1e-2, description="Target closeness of V to the Leray potential.", gt=0
    )
    grid_nodes: int = Field(4096, description="Sample nodes per profile.", ge=16)
    random_knots: int = Field(8, description="Interior knots of random profiles.", ge=0)
    random_bumps: int = Field(3, description="Bumps of random smooth profiles.", ge=0)


class SymmetryConfig(BaseSchema):
    """Rearrangement and mode decomposition grids."""

    angular_nodes: int = Field(64, description="Angular samples.", ge=4)
    radial_nodes: int = Field(2001, description="Radial samples.", ge=16)
    alias_tolerance: float = Field(
        1e-6, description="Energy share of the top mode that triggers a warning.", gt=0
    )


class AppConfig(BaseSchema):
    """Application-level configuration."""

    quad: QuadratureConfig = Field(description="Quadrature configuration.")
    spec: SpectralConfig = Field(description="Spectral configuration.")
    sweep: SweepConfig = Field(description="Sweep configuration.")
    profiles: ProfilesConfig = Field(description="Profile configuration.")
    symmetry: SymmetryConfig = Field(description="Symmetry configuration.")


config_path: Path = PACKAGE_PATH / "src/config/config.yaml"
config: DictConfig = OmegaConf.load(config_path).config
# Resolve all the variables
resolved_cfg = OmegaConf.to_container(config, resolve=True)
# Validate the config
app_config: AppConfig = AppConfig(**dict(resolved_cfg))  # type: ignore
