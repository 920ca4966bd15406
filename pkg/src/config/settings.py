import logging
from pathlib import Path

from dotenv import load_dotenv  # type: ignore
from pydantic import field_validator  # type: ignore
from pydantic_settings import BaseSettings, SettingsConfigDict  # type: ignore


class BaseSettingsConfig(BaseSettings):
    """Base configuration class for settings.

    This class extends BaseSettings to provide common configuration options
    for environment variable loading and processing.

    Attributes
    ----------
    model_config : SettingsConfigDict
        Configuration dictionary for the settings model specifying env file location,
        encoding and other processing options.
    """

    model_config = SettingsConfigDict(
        env_file=str(Path(".env").absolute()),
        env_file_encoding="utf-8",
        extra="ignore",
        from_attributes=True,
        populate_by_name=True,
        strict=True,
    )


class Settings(BaseSettingsConfig):
    """Environment driven settings of the lab."""

    # ===== OUTPUT =====
    LAB_OUTPUT_DIR: str = "results"

    # ===== LOGGING =====
    LOG_LEVEL: str = "INFO"

    @field_validator("LOG_LEVEL", mode="before")
    @classmethod
    def parse_log_level(cls, v: str) -> str:
        """Normalizes the log level name and rejects unknown levels."""
        name = str(v).strip().upper()
        if name not in logging.getLevelNamesMapping():
            raise ValueError(f"Invalid log level: {v!r}") from None
        return name

    @property
    def output_dir(self) -> Path:
        """Default directory for result files."""
        return Path(self.LAB_OUTPUT_DIR)

    @property
    def log_level(self) -> int:
        """Numeric logging level."""
        return logging.getLevelNamesMapping()[self.LOG_LEVEL]


def refresh_settings() -> Settings:
    """Refresh environment variables and return new Settings instance.

    This function reloads environment variables from .env file and creates
    a new Settings instance with the updated values.

    Returns
    -------
    Settings
        A new Settings instance with refreshed environment variables
    """
    load_dotenv(override=True)
    return Settings()


app_settings: Settings = refresh_settings()
