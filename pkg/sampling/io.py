"""CSV export of sampled phase points."""
from __future__ import annotations

from pathlib import Path
from typing import List

from artifacts import ArtifactHeader, write_csv

from .mcmc import MicrocanonicalRun


def sample_columns(n_particles: int, d: int) -> List[str]:
    coords = [f"x{k + 1}" for k in range(d - 1)] + ["y"]
    vels = [f"v{k + 1}" for k in range(d)]
    columns = ["sample"]
    for obj in range(n_particles + 1):
        label = "ball" if obj == n_particles else f"p{obj}"
        columns.extend(f"{label}_{c}" for c in coords)
        columns.extend(f"{label}_{v}" for v in vels)
    return columns


def write_samples_csv(path: Path, run: MicrocanonicalRun, header: ArtifactHeader) -> Path:
    """One row per state: every object's position followed by its velocity."""

    count, objects, d = run.positions.shape

    def rows():
        for s in range(count):
            row: list = [s]
            for obj in range(objects):
                row.extend(run.positions[s, obj])
                row.extend(run.velocities[s, obj])
            yield row

    return write_csv(path, header, sample_columns(objects - 1, d), rows())


__all__ = ["sample_columns", "write_samples_csv"]
