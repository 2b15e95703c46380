"""Options, config loading and report emission shared by every subcommand."""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import click
import yaml
from pydantic import BaseModel

from metastab.cli.config import is_yaml, validate_run_config
from metastab.cli.report import SERIES_FILE, ReportEnvelope, canonical_config, config_hash, timestamp, write_report, write_series
from metastab.core.config import get_settings
from metastab.core.errors import ConfigError

logger = logging.getLogger(__name__)

EXIT_OK: int = 0
EXIT_ERROR: int = 1
EXIT_VIOLATION: int = 2


def common_options(fn):
    fn = click.option("--seed", type=int, default=None, help="Override the config seed.")(fn)
    fn = click.option("--strict", is_flag=True, help="Exit with status 2 when a hypothesis is violated.")(fn)
    fn = click.option(
        "--out-dir",
        type=click.Path(file_okay=False, path_type=Path),
        default=None,
        help="Run directory for report.json and series.csv.",
    )(fn)
    return fn


def config_option(fn):
    return click.option(
        "--config",
        "config_path",
        type=click.Path(exists=True, dir_okay=False, path_type=Path),
        required=True,
        help="JSON or YAML run configuration.",
    )(fn)


def load_config(path: Path, command: str, seed: int | None):
    text = path.read_text(encoding="utf-8")
    try:
        data = yaml.safe_load(text) if is_yaml(path) else json.loads(text)
    except (yaml.YAMLError, json.JSONDecodeError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    if data.setdefault("command", command) != command:
        raise ConfigError(f"{path}: key 'command' is {data['command']!r}, expected {command!r}")
    if seed is not None:
        data["seed"] = seed
    return validate_run_config(data)


@dataclass
class RunOutput:
    payload: BaseModel
    columns: Sequence[str]
    rows: list[Sequence] = field(default_factory=list)
    violated: bool = False
    summary: str = ""


def run_directory(config: BaseModel, out_dir: Path | None) -> Path:
    return out_dir or get_settings().output_dir / f"{config.command}-{config_hash(config)[:12]}"


def emit(ctx: click.Context, config: BaseModel, started_at: str, output: RunOutput, out_dir: Path | None, strict: bool) -> Path:
    """Write report.json and series.csv, echo the summary and apply --strict."""
    target = run_directory(config, out_dir)
    envelope = ReportEnvelope(
        command=config.command,
        config_hash=config_hash(config),
        config=canonical_config(config),
        started_at=started_at,
        finished_at=timestamp(),
        payload=output.payload.model_dump(),
    )
    write_report(target, envelope)
    write_series(target / SERIES_FILE, output.columns, output.rows)
    logger.info("%s: wrote %s", config.command, target)

    if output.summary:
        click.echo(output.summary)
    if strict and output.violated:
        ctx.exit(EXIT_VIOLATION)
    return target
