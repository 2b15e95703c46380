"""report.json envelopes and series.csv tables written per run directory."""

import csv
import enum
import hashlib
import json
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Sequence

from pydantic import BaseModel, ConfigDict

from metastab import __version__
from metastab.core.config import get_settings

TOOL_NAME: str = "metastab"
REPORT_FILE: str = "report.json"
SERIES_FILE: str = "series.csv"
FLOAT_FORMAT: str = ".17g"


class ReportEnvelope(BaseModel):
    tool: str = TOOL_NAME
    version: str = __version__
    command: str
    config_hash: str
    config: dict[str, Any]
    started_at: str
    finished_at: str
    payload: dict[str, Any]

    model_config = ConfigDict(ser_json_inf_nan="constants")


def canonical_config(config: BaseModel) -> dict[str, Any]:
    return config.model_dump(mode="json")


def config_hash(config: BaseModel) -> str:
    """sha256 of the config serialized with sorted keys and no whitespace."""
    text = json.dumps(canonical_config(config), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def timestamp() -> str:
    fixed = get_settings().fixed_timestamp
    if fixed is not None:
        return fixed
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, enum.Enum):
        return str(value.value)
    if isinstance(value, float):
        return format(value, FLOAT_FORMAT)
    return str(value)


def write_series(path: Path, columns: Sequence[str], rows: Sequence[Sequence]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            if len(row) != len(columns):
                raise ValueError(f"row has {len(row)} cells, expected {len(columns)}")
            writer.writerow([format_cell(v) for v in row])
    return path


def write_report(out_dir: Path, envelope: ReportEnvelope) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / REPORT_FILE
    path.write_text(envelope.model_dump_json(indent=2) + "\n", encoding="utf-8")
    return path


def read_report(path: Path) -> ReportEnvelope:
    return ReportEnvelope.model_validate_json(path.read_text(encoding="utf-8"))
