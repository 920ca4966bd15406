"""
Tests for the command-line front end.
"""

import csv
import json
from pathlib import Path

import pytest

from src import cli
from src.cli import (
    EXIT_DOMAIN,
    EXIT_NUMERICAL,
    EXIT_OK,
    EXIT_RED_FLAG,
    build_parser,
    resolve_config,
    run,
)
from src.exceptions import BracketFailure, DivergentFactor, DomainError, NoConvergence
from src.schemas import LadderReport, LadderRow, SelftestCheck, SelftestReport
from src.schemas.types import Command, FamilyName, OutputFormat


def _write_config(path: Path, document: object) -> str:
    path.write_text(json.dumps(document), encoding="utf-8")
    return str(path)


class TestParsing:
    """Test flag parsing and config layering."""

    def test_flags_override_config_file(self, tmp_path: Path) -> None:
        """Test flags > config file > defaults."""
        # Given
        config = _write_config(tmp_path / "run.json", {"mu": 0.25, "p": 1.5})

        # When
        args = build_parser().parse_args(["moser-sweep", "--mu", "0.5", "--config", config])
        cfg = resolve_config(args)

        # Then
        assert cfg.command is Command.MOSER_SWEEP
        assert cfg.mu == 0.5
        assert cfg.p == 1.5
        assert cfg.format is OutputFormat.JSON

    def test_command_defaults(self) -> None:
        """Test the per-command default layer."""
        cfg = resolve_config(build_parser().parse_args(["rearrange"]))
        assert cfg.potential == "v3"

    def test_dashed_flags(self) -> None:
        """Test that dashed flags land on the config fields."""
        cfg = resolve_config(
            build_parser().parse_args(["leray-constant", "--N-ladder", "64", "128"])
        )
        assert cfg.N_ladder == [64, 128]

    def test_family_name(self) -> None:
        cfg = resolve_config(build_parser().parse_args(["family", "gen", "--name", "plateau"]))
        assert cfg.family is FamilyName.PLATEAU
        assert cfg.action == "gen"


class TestExitCodes:
    """Test the mapping from outcomes to exit codes."""

    def test_help(self) -> None:
        assert run(["--help"]) == EXIT_OK

    def test_unknown_flag(self) -> None:
        assert run(["potential", "eval", "--bogus"]) == EXIT_DOMAIN

    def test_missing_command(self) -> None:
        assert run([]) == EXIT_DOMAIN

    def test_domain_error(self, output_dir: Path) -> None:
        """Test that a coupling below -1/4 is a domain error."""
        assert run(["energy", "--mu", "-1"]) == EXIT_DOMAIN

    def test_unknown_config_key(self, tmp_path: Path) -> None:
        config = _write_config(tmp_path / "run.json", {"bogus": 1})
        assert run(["potential", "eval", "--r", "0.5", "--config", config]) == EXIT_DOMAIN

    def test_unreadable_config(self, tmp_path: Path) -> None:
        assert run(["selftest", "--config", str(tmp_path / "missing.json")]) == EXIT_DOMAIN

    def test_malformed_config(self, tmp_path: Path) -> None:
        path = tmp_path / "run.json"
        path.write_text("{not json", encoding="utf-8")
        assert run(["selftest", "--config", str(path)]) == EXIT_DOMAIN

    @pytest.mark.parametrize(
        "error, code",
        [
            (NoConvergence("slow"), EXIT_NUMERICAL),
            (BracketFailure("same verdict"), EXIT_NUMERICAL),
            (DivergentFactor("diverges"), EXIT_NUMERICAL),
            (DomainError("outside"), EXIT_DOMAIN),
        ],
    )
    def test_error_classes(self, error: Exception, code: int) -> None:
        assert cli._exit_code(error) == code

    def test_red_flag(self, monkeypatch: pytest.MonkeyPatch) -> None:
        """Test that a failed identity check exits with the red-flag code."""
        # Given
        failed = SelftestReport(
            checks=[SelftestCheck(name="broken", value=1.0, expected=0.0, residual=1.0, passed=False)]
        )
        monkeypatch.setattr(cli, "run_selftest", lambda: failed)

        # Then
        assert run(["selftest"]) == EXIT_RED_FLAG

    def test_unconverged_ladder(self, monkeypatch: pytest.MonkeyPatch, tmp_path: Path) -> None:
        """Test that a ladder with a stalled eigenpair is written and exits as numerical failure."""
        # Given
        report = LadderReport(
            name="leray",
            rows=[LadderRow(N=64, value=0.27, residual=1e-3, converged=False)],
            nonincreasing=True,
        )
        monkeypatch.setattr(cli, "estimate_leray_constant", lambda ladder, tol: report)
        out = tmp_path / "leray.csv"

        # When
        code = run(["leray-constant", "--format", "csv", "--out", str(out)])

        # Then
        assert code == EXIT_NUMERICAL
        assert out.read_text(encoding="utf-8").splitlines()[-1] == "64,0.001,0.27,unconverged"


class TestCommands:
    """Test subcommands end to end."""

    def test_potential_eval(self, capsys: pytest.CaptureFixture[str]) -> None:
        """Test V3(1) = 1/4 on the console."""
        # When
        code = run(["potential", "eval", "--name", "v3", "--r", "1"])

        # Then
        assert code == EXIT_OK
        assert "0.25" in capsys.readouterr().out

    def test_potential_table_json(self, output_dir: Path) -> None:
        """Test the JSON document written to the output directory."""
        # When
        code = run(["potential", "table", "--name", "v3", "--count", "5"])

        # Then
        document = json.loads((output_dir / "potential-table.json").read_text(encoding="utf-8"))
        assert code == EXIT_OK
        assert len(document["result"]["values"]) == 5
        assert document["config"]["command"] == "potential"
        assert len(document["payload_sha256"]) == 64
        assert "generated_at" in document

    def test_sweep_csv(self, tmp_path: Path) -> None:
        """Test one CSV row per (n, alpha) cell."""
        # Given
        out = tmp_path / "sweep.csv"

        # When
        code = run(
            [
                "moser-sweep",
                "--ns", "16", "32",
                "--alphas", "6", "14",
                "--format", "csv",
                "--out", str(out),
            ]
        )

        # Then
        with out.open(encoding="utf-8") as handle:
            rows = list(csv.reader(handle))
        assert code == EXIT_OK
        assert rows[0] == ["axis1", "axis2", "value", "flag"]
        assert len(rows) == 1 + 2 * 2
        assert {row[3] for row in rows[1:]} <= {"bounded", "growing"}

    def test_family_gen_from_config(self, tmp_path: Path) -> None:
        """Test a family index taken from the config file."""
        # Given
        config = _write_config(tmp_path / "run.json", {"n": 12})
        out = tmp_path / "moser.json"

        # When
        code = run(["family", "gen", "--name", "moser", "--config", config, "--out", str(out)])

        # Then
        document = json.loads(out.read_text(encoding="utf-8"))
        assert code == EXIT_OK
        assert document["result"]["params"]["n"] == 12.0
        assert len(document["result"]["nodes"]) == len(document["result"]["values"])

    def test_unwritable_output(self, tmp_path: Path) -> None:
        """Test that a failed write is reported as an error."""
        blocker = tmp_path / "file"
        blocker.write_text("", encoding="utf-8")
        code = run(["potential", "table", "--name", "v3", "--out", str(blocker / "out.json")])
        assert code == EXIT_DOMAIN

    @pytest.mark.slow
    def test_selftest(self, capsys: pytest.CaptureFixture[str]) -> None:
        """Test that every closed-form identity holds."""
        assert run(["selftest"]) == EXIT_OK
        assert "all identities hold" in capsys.readouterr().out
