"""
Tests for result files, the loaded configuration and the loggers.
"""

import json
import logging
import math
import sys
from collections.abc import Iterator
from pathlib import Path

import pytest

from src import LOGGER_NAMESPACE, create_logger, set_log_level
from src.config import app_config
from src.config.settings import Settings
from src.exceptions import IoError
from src.schemas import LadderReport, RunConfig, SweepResult
from src.schemas.output_schema import LadderRow
from src.schemas.types import Command, Verdict
from src.utilities.serialization import (
    canonical_json,
    emit,
    payload_sha256,
    table_rows,
    to_jsonable,
)


@pytest.fixture
def sweep() -> SweepResult:
    return SweepResult(
        family="moser",
        params={"mu": 0.0},
        axis1=[10.0, 20.0],
        axis2=[6.0, 20.0],
        table=[[1.2, 1.3], [5.0, math.inf]],
        verdicts=[Verdict.BOUNDED, Verdict.GROWING],
    )


class TestJson:
    """Test the JSON encoding."""

    def test_non_finite_values(self) -> None:
        assert to_jsonable([math.inf, -math.inf, math.nan, 1.5]) == ["inf", "-inf", "nan", 1.5]

    def test_canonical_json_is_key_sorted(self, sweep: SweepResult) -> None:
        """Test a stable compact encoding."""
        text = canonical_json(sweep)
        assert text == canonical_json(sweep.model_copy())
        assert '"inf"' in text
        assert text.index('"axis1"') < text.index('"verdicts"')

    def test_hash_ignores_timestamp(self, sweep: SweepResult, tmp_path: Path) -> None:
        """Test that two writes of the same payload carry the same hash."""
        # Given
        config = RunConfig(command=Command.MOSER_SWEEP, mu=0.0)

        # When
        first = json.loads(emit(sweep, "json", tmp_path / "a.json", config).read_text(encoding="utf-8"))
        second = json.loads(emit(sweep, "json", tmp_path / "b.json", config).read_text(encoding="utf-8"))

        # Then
        assert first["payload_sha256"] == second["payload_sha256"] == payload_sha256(config, sweep)
        assert first["result"]["table"][1][1] == "inf"
        assert first["config"]["command"] == "moser-sweep"

    def test_hash_depends_on_config(self, sweep: SweepResult) -> None:
        assert payload_sha256(RunConfig(mu=0.0), sweep) != payload_sha256(RunConfig(mu=0.5), sweep)


class TestCsv:
    """Test the flat table layout."""

    def test_sweep_rows(self, sweep: SweepResult) -> None:
        """Test one row per cell with the row verdict as flag."""
        rows = table_rows(sweep)
        assert len(rows) == 4
        assert rows[0] == (10.0, 6.0, 1.2, "bounded")
        assert rows[-1] == (20.0, 20.0, math.inf, "growing")

    def test_ladder_rows(self) -> None:
        """Test that the truncation value is appended as a flagged row."""
        # Given
        report = LadderReport(
            name="leray",
            rows=[LadderRow(N=256, value=0.26, residual=1e-12)],
            nonincreasing=True,
            truncation_value=0.255,
        )

        # Then
        assert table_rows(report) == [(256, 1e-12, 0.26, ""), (256, None, 0.255, "truncation")]

    def test_csv_file(self, sweep: SweepResult, tmp_path: Path) -> None:
        """Test the header and the written non-finite cell."""
        # When
        path = emit(sweep, "csv", tmp_path / "nested" / "sweep.csv")

        # Then
        lines = path.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "axis1,axis2,value,flag"
        assert lines[-1] == "20.0,20.0,inf,growing"

    def test_unwritable_path(self, sweep: SweepResult, tmp_path: Path) -> None:
        """Test that write failures carry the path."""
        # Given
        blocker = tmp_path / "file"
        blocker.write_text("", encoding="utf-8")

        # Then
        with pytest.raises(IoError, match="cannot write result file"):
            emit(sweep, "csv", blocker / "sweep.csv")


class TestConfig:
    """Test the loaded configuration and settings."""

    def test_defaults(self) -> None:
        assert app_config.quad.tol == 1e-10
        assert app_config.spec.N == 4096
        assert app_config.sweep.seed == 20240917
        assert app_config.symmetry.angular_nodes == 64

    def test_interpolated_cutoff(self) -> None:
        """Test that the spectral cut-off follows the quadrature one."""
        assert app_config.spec.tmax == app_config.quad.tmax

    def test_settings_from_environment(self, output_dir: Path, monkeypatch: pytest.MonkeyPatch) -> None:
        """Test the output directory and the normalized log level."""
        # Given
        monkeypatch.setenv("LOG_LEVEL", "debug")

        # When
        settings = Settings()

        # Then
        assert settings.output_dir == output_dir
        assert settings.LOG_LEVEL == "DEBUG"

    def test_invalid_log_level(self, monkeypatch: pytest.MonkeyPatch) -> None:
        monkeypatch.setenv("LOG_LEVEL", "chatty")
        with pytest.raises(ValueError, match="Invalid log level"):
            Settings()


class TestLogging:
    """Test the lab loggers."""

    @pytest.fixture(autouse=True)
    def restore_level(self) -> Iterator[None]:
        yield
        set_log_level(logging.INFO)

    def test_namespaced_on_stderr(self) -> None:
        """Test the name, the stream and that re-creation keeps one handler."""
        # When
        create_logger(name="unit")
        logger = create_logger(name="unit")

        # Then
        assert logger.name == f"{LOGGER_NAMESPACE}.unit"
        assert not logger.propagate
        assert len(logger.handlers) == 1
        assert logger.handlers[0].stream is sys.stderr

    def test_set_log_level_reaches_module_loggers(self) -> None:
        """Test that the verbosity switch re-levels loggers and handlers."""
        # Given
        logger = create_logger(name="unit", log_level=logging.WARNING)

        # When
        set_log_level(logging.DEBUG)

        # Then
        assert logger.level == logging.DEBUG
        assert logger.handlers[0].level == logging.DEBUG
        assert logging.getLogger(f"{LOGGER_NAMESPACE}.serialization").level == logging.DEBUG
