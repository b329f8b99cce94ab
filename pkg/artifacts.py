"""CSV artifacts stamped with the configuration hash, seed and package version."""
from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from config import VERSION

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ArtifactHeader:
    config_hash: str
    seed: Optional[int]
    version: str = VERSION

    def line(self) -> str:
        seed = "none" if self.seed is None else str(self.seed)
        return f"# gasball {self.version} config={self.config_hash} seed={seed}"


def format_value(value: object) -> str:
    """Shortest text that round-trips floats; bools become 0/1."""

    if isinstance(value, np.generic):
        # np.float64 is a float subclass with its own repr
        return format_value(value.item())
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(
    path: Path,
    header: ArtifactHeader,
    columns: Sequence[str],
    rows: Iterable[Sequence[object]],
) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as fh:
        fh.write(header.line() + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_value(value) for value in row])
    logger.debug("wrote %s", path)
    return path


def read_csv(path: Path) -> tuple:
    """Return ``(header_line, columns, rows)`` of an artifact written by :func:`write_csv`."""

    with Path(path).open("r", encoding="utf-8", newline="") as fh:
        header_line = fh.readline().rstrip("\n")
        reader = csv.reader(fh)
        columns = next(reader)
        rows = [row for row in reader]
    return header_line, columns, rows


__all__ = ["ArtifactHeader", "format_value", "read_csv", "write_csv"]
