"""Predicted-versus-observed tables and CSV exports."""
from __future__ import annotations

import io
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np
from rich.console import Console
from rich.table import Table

from artifacts import ArtifactHeader, write_csv
from errors import InsufficientDataError
from physics.equilibrium import EquilibriumSolution, ball_height_density, predicted_kinetic_energy
from physics.geometry import ModelParams

from .ks import histogram_ks_distance
from .marginals import PredictedMarginal, predicted_height_marginal
from .summary import EmpiricalSummary

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EquipartitionReport:
    samples: int
    particle_ke: float
    particle_ke_stderr: float
    ball_ke: float
    ball_ke_stderr: float
    particle_ke_total_mass: float
    predicted: Optional[float] = None

    @property
    def relative_error(self) -> float:
        """Gap between ``½·m·‖v‖²`` and ``dmg/(2λ_A)``."""

        if self.predicted is None:
            return math.nan
        return abs(self.particle_ke_total_mass - self.predicted) / self.predicted

    def to_dict(self) -> Dict[str, float]:
        return {
            "samples": self.samples,
            "particle_ke": self.particle_ke,
            "particle_ke_stderr": self.particle_ke_stderr,
            "ball_ke": self.ball_ke,
            "ball_ke_stderr": self.ball_ke_stderr,
            "particle_ke_total_mass": self.particle_ke_total_mass,
            "predicted": math.nan if self.predicted is None else self.predicted,
            "relative_error": self.relative_error,
        }


def _mean_and_stderr(values: np.ndarray) -> tuple:
    if values.size < 2:
        return float(values.mean()), math.nan
    return float(values.mean()), float(values.std(ddof=1) / math.sqrt(values.size))


def equipartition_report(
    stream: Iterable[np.ndarray],
    params: ModelParams,
    *,
    lambda_A: Optional[float] = None,
) -> EquipartitionReport:
    """Mean kinetic energy per particle and of the ball over a stream of velocity arrays.

    ``particle_ke`` uses the particle mass ``m/n``; ``particle_ke_total_mass``
    uses ``m`` and is the quantity compared with ``dmg/(2λ_A)``.
    """

    particle, ball = [], []
    for velocities in stream:
        velocities = np.asarray(velocities, dtype=float)
        speeds_sq = np.einsum("ij,ij->i", velocities, velocities)
        particle.append(0.5 * params.particle_mass * float(np.mean(speeds_sq[:-1])))
        ball.append(0.5 * params.M * float(speeds_sq[-1]))
    if not particle:
        raise InsufficientDataError("equipartition report needs at least one velocity sample")
    p_mean, p_err = _mean_and_stderr(np.asarray(particle))
    b_mean, b_err = _mean_and_stderr(np.asarray(ball))
    return EquipartitionReport(
        samples=len(particle),
        particle_ke=p_mean,
        particle_ke_stderr=p_err,
        ball_ke=b_mean,
        ball_ke_stderr=b_err,
        particle_ke_total_mass=p_mean * params.n,
        predicted=None if lambda_A is None else predicted_kinetic_energy(lambda_A, params),
    )


def summary_equipartition(summary: EmpiricalSummary, params: ModelParams, lambda_A: float) -> EquipartitionReport:
    literal, literal_err = summary.particle_ke_literal
    ball, ball_err = summary.ball_ke
    total_mass, _ = summary.particle_ke
    return EquipartitionReport(
        samples=summary.observations,
        particle_ke=literal,
        particle_ke_stderr=literal_err,
        ball_ke=ball,
        ball_ke_stderr=ball_err,
        particle_ke_total_mass=total_mass,
        predicted=predicted_kinetic_energy(lambda_A, params),
    )


@dataclass(frozen=True)
class ComparisonRow:
    name: str
    observed: float
    predicted: float
    tolerance: float
    passed: bool
    note: str = ""

    @classmethod
    def relative(cls, name: str, observed: float, predicted: float, tolerance: float, note: str = "") -> "ComparisonRow":
        error = abs(observed - predicted) / abs(predicted) if predicted else abs(observed)
        return cls(name, observed, predicted, tolerance, bool(error <= tolerance), note)

    @classmethod
    def absolute(cls, name: str, observed: float, predicted: float, tolerance: float, note: str = "") -> "ComparisonRow":
        return cls(name, observed, predicted, tolerance, bool(abs(observed - predicted) < tolerance), note)

    @classmethod
    def upper_bound(cls, name: str, observed: float, bound: float, note: str = "") -> "ComparisonRow":
        return cls(name, observed, 0.0, bound, bool(observed < bound), note)

    @classmethod
    def lower_bound(cls, name: str, observed: float, bound: float, note: str = "") -> "ComparisonRow":
        return cls(name, observed, 0.0, bound, bool(observed > bound), note)


def render_report(rows: Sequence[ComparisonRow], title: str) -> str:
    """Plain-text table of *rows* as written to ``report.txt``."""

    table = Table(title=title)
    for column in ("check", "observed", "predicted", "tolerance", "result", "note"):
        table.add_column(column)
    for row in rows:
        table.add_row(
            row.name,
            f"{row.observed:.6g}",
            f"{row.predicted:.6g}",
            f"{row.tolerance:.3g}",
            "PASS" if row.passed else "FAIL",
            row.note,
        )
    buffer = io.StringIO()
    console = Console(file=buffer, no_color=True, highlight=False, soft_wrap=False, width=120)
    console.print(table)
    return buffer.getvalue()


def predicted_gas_fractions(marginal: PredictedMarginal, edges: np.ndarray) -> np.ndarray:
    """Predicted probability per bin, overflow slot last."""

    cdf = marginal.cdf(np.asarray(edges, dtype=float))
    return np.append(np.diff(cdf), 1.0 - cdf[-1])


def simulation_report_rows(
    summary: EmpiricalSummary,
    params: ModelParams,
    solution: EquilibriumSolution,
    *,
    tolerance_scale: float = 1.0,
) -> List[ComparisonRow]:
    """Observed-versus-predicted rows for one simulation; KS values are also stored on *summary*."""

    rows: List[ComparisonRow] = []
    tol = 0.05 * tolerance_scale
    if solution.floating:
        rows.append(ComparisonRow.relative("mean ball height", summary.ball_height_mean, solution.y_A, tol))

    marginal = predicted_height_marginal(solution.lambda_A, solution.y_A, params)
    try:
        gas_ks = histogram_ks_distance(summary.bin_edges, summary.gas_counts, marginal.cdf, count=summary.gas_samples)
        summary.ks["gas_height"] = gas_ks
        rows.append(ComparisonRow.upper_bound("gas height KS", gas_ks, tol))
    except InsufficientDataError as exc:
        logger.warning("gas height KS skipped: %s", exc.message)

    if params.M > 0.0:
        profile = ball_height_density(params.n, params)
        try:
            ball_ks = histogram_ks_distance(
                summary.ball_edges, summary.ball_occupation, profile.cdf, count=summary.observations
            )
            summary.ks["ball_height"] = ball_ks
            rows.append(ComparisonRow.upper_bound("ball height KS", ball_ks, tol))
        except InsufficientDataError as exc:
            logger.warning("ball height KS skipped: %s", exc.message)

    if summary.observations > 0:
        particle_ke, _ = summary.particle_ke
        rows.append(
            ComparisonRow.relative(
                "particle kinetic energy", particle_ke, predicted_kinetic_energy(solution.lambda_A, params), tol
            )
        )
    rows.append(ComparisonRow.upper_bound("energy drift", summary.energy_drift, 1e-9 * tolerance_scale))
    return rows


def write_summary_csv(path: Path, summary: EmpiricalSummary, header: ArtifactHeader) -> Path:
    row = summary.to_row()
    return write_csv(path, header, ["metric", "value"], ([key, value] for key, value in row.items()))


def _histogram_rows(
    series: str, edges: np.ndarray, fractions: np.ndarray, predicted: Optional[np.ndarray]
) -> List[list]:
    rows: List[list] = []
    for k in range(len(edges)):
        lo = edges[k]
        hi = edges[k + 1] if k + 1 < len(edges) else math.inf
        rows.append([series, lo, hi, fractions[k], "" if predicted is None else predicted[k]])
    return rows


def write_histogram_csv(
    path: Path,
    summary: EmpiricalSummary,
    header: ArtifactHeader,
    predicted_gas: Optional[np.ndarray] = None,
    predicted_ball: Optional[np.ndarray] = None,
) -> Path:
    """Gas rows on the gas edges, then ball rows on the ball edges; each series ends with its overflow slot."""

    rows = _histogram_rows("gas", summary.bin_edges, summary.gas_histogram, predicted_gas)
    rows += _histogram_rows("ball", summary.ball_edges, summary.ball_histogram, predicted_ball)
    return write_csv(path, header, ["series", "bin_lo", "bin_hi", "fraction", "predicted_fraction"], rows)


__all__ = [
    "ComparisonRow",
    "EquipartitionReport",
    "equipartition_report",
    "predicted_gas_fractions",
    "render_report",
    "simulation_report_rows",
    "summary_equipartition",
    "write_histogram_csv",
    "write_summary_csv",
]
