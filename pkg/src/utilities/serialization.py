"""
Result files: plot-ready CSV tables and JSON documents with provenance.
"""

import csv
import hashlib
import json
import math
from datetime import UTC, datetime
from enum import Enum
from pathlib import Path
from typing import Any

from pydantic import BaseModel  # type: ignore

from src import create_logger
from src.exceptions import IoError
from src.schemas import (
    LadderReport,
    PotentialTable,
    ProfileSamples,
    RunConfig,
    SelftestReport,
    SweepResult,
)
from src.schemas.types import OutputFormat

logger = create_logger(name="serialization")

CSV_HEADER: tuple[str, ...] = ("axis1", "axis2", "value", "flag")
type Row = tuple[Any, Any, Any, str]


def _non_finite(x: float) -> str:
    if math.isnan(x):
        return "nan"
    return "inf" if x > 0 else "-inf"


def to_jsonable(obj: Any) -> Any:
    """Replaces non-finite floats by strings and enums by their values, recursively."""
    match obj:
        case bool() | None | str():
            return obj
        case float():
            return obj if math.isfinite(obj) else _non_finite(obj)
        case int():
            return obj
        case Enum():
            return obj.value
        case BaseModel():
            return to_jsonable(obj.model_dump(mode="python"))
        case dict():
            return {str(k): to_jsonable(v) for k, v in obj.items()}
        case list() | tuple():
            return [to_jsonable(v) for v in obj]
        case _:
            # numpy scalars
            return to_jsonable(obj.item()) if hasattr(obj, "item") else str(obj)


def canonical_json(obj: Any) -> str:
    """Key-sorted compact JSON; floats use the shortest round-trip decimal."""
    return json.dumps(to_jsonable(obj), sort_keys=True, separators=(",", ":"), allow_nan=False)


def payload_sha256(config: RunConfig | None, result: BaseModel) -> str:
    """Hash of config and result; the generation timestamp never enters it."""
    payload = {
        "config": None if config is None else config.model_dump(mode="json"),
        "result": result,
    }
    return hashlib.sha256(canonical_json(payload).encode()).hexdigest()


def _cell(x: Any) -> str:
    match x:
        case None:
            return ""
        case bool():
            return "true" if x else "false"
        case float():
            return repr(x) if math.isfinite(x) else _non_finite(x)
        case Enum():
            return str(x.value)
        case _:
            return str(x)


def table_rows(result: BaseModel) -> list[Row]:
    """Flattens a result into (axis1, axis2, value, flag) rows.

    Sweep tables give one row per cell with the row verdict as flag. Profile
    samples put the node in axis1 and the derivative in axis2. Reports without
    a natural table give one row per scalar field, named in the flag column.
    """
    match result:
        case SweepResult():
            return [
                (a1, a2, result.table[i2][i1], result.verdicts[i2].value)
                for i2, a2 in enumerate(result.axis2)
                for i1, a1 in enumerate(result.axis1)
            ]
        case LadderReport():
            rows: list[Row] = [
                (row.N, row.residual, row.value, "" if row.converged else "unconverged")
                for row in result.rows
            ]
            if result.truncation_value is not None and result.rows:
                flag = "truncation" if result.truncation_converged else "truncation:unconverged"
                rows.append((result.rows[-1].N, None, result.truncation_value, flag))
            return rows
        case PotentialTable():
            return [(r, None, v, "") for r, v in zip(result.radii, result.values)]
        case ProfileSamples():
            return list(
                zip(result.nodes, result.derivative, result.values, [""] * len(result.nodes))
            )
        case SelftestReport():
            return [
                (i, check.expected, check.value, check.name if check.passed else f"{check.name}:failed")
                for i, check in enumerate(result.checks)
            ]
        case _:
            return [
                (None, None, value, name)
                for name, value in result.model_dump(mode="python").items()
                if isinstance(value, (int, float)) or value is None
            ]


def _write_csv(result: BaseModel, path: Path) -> None:
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for row in table_rows(result):
            writer.writerow([_cell(x) for x in row])


def _write_json(result: BaseModel, path: Path, config: RunConfig | None) -> None:
    document = {
        "config": None if config is None else to_jsonable(config.model_dump(mode="json")),
        "result": to_jsonable(result),
        "payload_sha256": payload_sha256(config, result),
        "generated_at": datetime.now(UTC).isoformat(timespec="seconds"),
    }
    with path.open("w", encoding="utf-8") as handle:
        json.dump(document, handle, sort_keys=True, indent=2, allow_nan=False)
        handle.write("\n")


def emit(
    result: BaseModel,
    format: OutputFormat | str,
    path: str | Path,
    config: RunConfig | None = None,
) -> Path:
    """Writes ``result`` to ``path`` as CSV or JSON.

    Parameters
    ----------
    result : BaseModel
        Any result schema of the lab.
    format : OutputFormat | str
        ``csv`` or ``json``.
    path : str | Path
        Target file; missing parent directories are created.
    config : RunConfig, optional
        Embedded verbatim in JSON output for provenance.

    Returns
    -------
    Path
        The written file.

    Raises
    ------
    IoError
        If the file cannot be written; the message carries the path.
    """
    fmt = OutputFormat(format)
    target = Path(path)
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        if fmt is OutputFormat.CSV:
            _write_csv(result, target)
        else:
            _write_json(result, target, config)
    except OSError as e:
        logger.error(f"Failed to write {target!s}: {e}")
        raise IoError(f"cannot write result file {str(target)!r}: {e}") from e

    logger.info(f"Wrote {fmt.value} result to {target!s}")
    return target


__all__: list[str] = ["CSV_HEADER", "canonical_json", "emit", "payload_sha256", "table_rows", "to_jsonable"]
