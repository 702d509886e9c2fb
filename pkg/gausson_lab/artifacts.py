"""Deterministic CSV / JSON artifacts; every file embeds the resolved configuration."""

from __future__ import annotations

import csv
import json
import logging
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .config import ExperimentConfig, format_value

logger = logging.getLogger(__name__)


def prepare_output_dir(config: ExperimentConfig) -> Path:
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.resolved").write_text(config.to_text(), encoding="utf-8")
    return out


def write_csv(
    path: Path, columns: Sequence[str], rows: Iterable[Mapping], config: ExperimentConfig
) -> Path:
    """'# key=value' config header, then a plain CSV table with 17-digit floats."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        for key, value in config.items():
            fh.write(f"# {key}={value}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_value(row[c]) for c in columns])
    logger.info("wrote %s", path)
    return path


def write_json(path: Path, payload: Mapping, config: ExperimentConfig) -> Path:
    data = dict(payload)
    data["config"] = dict(config.items())
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")
    logger.info("wrote %s", path)
    return path


def write_failures(out: Path, failures: Sequence[Mapping], config: ExperimentConfig) -> Path:
    return write_json(out / "failures.json", {"failures": list(failures)}, config)
