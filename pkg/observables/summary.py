"""Streaming observables of a simulation run.

Ball-height statistics are time-weighted: every ballistic segment of the ball
contributes its exact occupation time per bin and its exact height integrals.
The gas profile and kinetic energies come from snapshots taken at a fixed
observation interval.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np

from errors import InvalidParameterError
from physics.equilibrium import solve_or_rest
from physics.geometry import ModelParams

logger = logging.getLogger(__name__)

DEFAULT_BINS = 128
UNIFORMITY_BINS = 16


def default_bin_edges(params: ModelParams, bins: int = DEFAULT_BINS) -> np.ndarray:
    """Equal-width edges over ``[0, max(4/λ_A, y_A + 2R)]``."""

    solution = solve_or_rest(params)
    top = max(4.0 / solution.lambda_A, solution.y_A + 2.0 * params.R)
    return np.linspace(0.0, top, bins + 1)


def ball_bin_edges(params: ModelParams, bins: int = DEFAULT_BINS) -> np.ndarray:
    """Equal-width edges over the heights the ball can reach, ``[R, E/(Mg)]``.

    Without a ball the gas edges are used.
    """

    if params.M <= 0.0:
        return default_bin_edges(params, bins)
    return np.linspace(params.R, params.ceiling, bins + 1)


def bin_index(values: np.ndarray, edges: np.ndarray) -> np.ndarray:
    """Bin of each value; values at or above the last edge go to the overflow slot ``len(edges) − 1``."""

    idx = np.searchsorted(edges, values, side="right") - 1
    return np.clip(idx, 0, len(edges) - 1)


def bin_counts(values: np.ndarray, edges: np.ndarray) -> np.ndarray:
    return np.bincount(bin_index(np.asarray(values, dtype=float), edges), minlength=len(edges)).astype(np.int64)


def parabola_occupation(y0: float, vy: float, g: float, duration: float, edges: np.ndarray) -> np.ndarray:
    """Exact time spent in each height bin by ``y0 + vy·t − g·t²/2`` for ``t ∈ [0, duration]``.

    The result has one slot per bin plus the overflow slot and sums to *duration*.
    """

    edges = np.asarray(edges, dtype=float)
    out = np.zeros(len(edges))
    if duration <= 0.0:
        return out
    if g == 0.0:
        roots = (edges - y0) / vy if vy != 0.0 else np.empty(0)
    else:
        disc = vy * vy - 2.0 * g * (edges - y0)
        root = np.sqrt(disc[disc >= 0.0])
        roots = np.concatenate([(vy - root) / g, (vy + root) / g])
    roots = roots[(roots > 0.0) & (roots < duration)]
    breaks = np.unique(np.concatenate([[0.0, duration], roots]))
    mids = 0.5 * (breaks[1:] + breaks[:-1])
    heights = y0 + vy * mids - 0.5 * g * mids * mids
    np.add.at(out, bin_index(heights, edges), np.diff(breaks))
    return out


def height_integrals(y0: float, vy: float, g: float, duration: float) -> tuple:
    """``(∫y dt, ∫y² dt)`` over one ballistic segment."""

    a, b, c, t = y0, vy, -0.5 * g, duration
    first = a * t + b * t**2 / 2.0 + c * t**3 / 3.0
    second = a * a * t + a * b * t**2 + (b * b + 2.0 * a * c) * t**3 / 3.0 + b * c * t**4 / 2.0 + c * c * t**5 / 5.0
    return first, second


def uniform_coordinate(horizontal: np.ndarray, radius: float) -> np.ndarray:
    """Map horizontal positions in the disc of *radius* to ``[0, 1]``, uniform when the positions are."""

    horizontal = np.atleast_2d(horizontal)
    if horizontal.shape[1] == 1:
        return (horizontal[:, 0] + radius) / (2.0 * radius)
    r_sq = np.einsum("ij,ij->i", horizontal, horizontal)
    return (r_sq / radius**2) ** (0.5 * horizontal.shape[1])


@dataclass
class EmpiricalSummary:
    bin_edges: np.ndarray
    ball_edges: np.ndarray = None  # type: ignore[assignment]
    n_particles: int = 0
    particle_mass: float = 0.0
    ball_mass: float = 0.0
    ball_time: float = 0.0
    ball_height_integral: float = 0.0
    ball_height_sq_integral: float = 0.0
    ball_occupation: np.ndarray = None  # type: ignore[assignment]
    gas_counts: np.ndarray = None  # type: ignore[assignment]
    ball_x_counts: np.ndarray = field(default_factory=lambda: np.zeros(UNIFORMITY_BINS, dtype=np.int64))
    observations: int = 0
    speed_sq_sum: float = 0.0
    speed_sq_sq_sum: float = 0.0
    ball_ke_sum: float = 0.0
    ball_ke_sq_sum: float = 0.0
    events: Dict[str, int] = field(default_factory=dict)
    energy_drift: float = 0.0
    max_horizontal_speed: float = 0.0
    seed: Optional[int] = None
    config_hash: Optional[str] = None
    ks: Dict[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.bin_edges = np.asarray(self.bin_edges, dtype=float)
        if self.ball_edges is None:
            self.ball_edges = self.bin_edges.copy()
        self.ball_edges = np.asarray(self.ball_edges, dtype=float)
        if self.ball_occupation is None:
            self.ball_occupation = np.zeros(len(self.ball_edges))
        if self.gas_counts is None:
            self.gas_counts = np.zeros(len(self.bin_edges), dtype=np.int64)

    # derived -------------------------------------------------------------

    @property
    def ball_height_mean(self) -> float:
        return self.ball_height_integral / self.ball_time if self.ball_time > 0.0 else math.nan

    @property
    def ball_height_std(self) -> float:
        if self.ball_time <= 0.0:
            return math.nan
        var = self.ball_height_sq_integral / self.ball_time - self.ball_height_mean**2
        return math.sqrt(max(var, 0.0))

    @property
    def ball_histogram(self) -> np.ndarray:
        return self.ball_occupation / self.ball_time if self.ball_time > 0.0 else self.ball_occupation

    @property
    def gas_samples(self) -> int:
        return int(self.gas_counts.sum())

    @property
    def gas_histogram(self) -> np.ndarray:
        total = self.gas_samples
        return self.gas_counts / total if total else self.gas_counts.astype(float)

    def _mean_and_stderr(self, total: float, total_sq: float) -> tuple:
        if self.observations == 0:
            return math.nan, math.nan
        mean = total / self.observations
        if self.observations < 2:
            return mean, math.nan
        var = max(total_sq / self.observations - mean * mean, 0.0)
        return mean, math.sqrt(var / (self.observations - 1))

    @property
    def particle_ke(self) -> tuple:
        """Mean and standard error of ``½·m·‖v‖²`` with the total gas mass ``m``."""

        total_mass = self.particle_mass * self.n_particles
        mean, err = self._mean_and_stderr(self.speed_sq_sum, self.speed_sq_sq_sum)
        return 0.5 * total_mass * mean, 0.5 * total_mass * err

    @property
    def particle_ke_literal(self) -> tuple:
        """Mean and standard error of ``½·(m/n)·‖v‖²``."""

        mean, err = self._mean_and_stderr(self.speed_sq_sum, self.speed_sq_sq_sum)
        return 0.5 * self.particle_mass * mean, 0.5 * self.particle_mass * err

    @property
    def ball_ke(self) -> tuple:
        return self._mean_and_stderr(self.ball_ke_sum, self.ball_ke_sq_sum)

    @property
    def total_events(self) -> int:
        return int(sum(self.events.values()))

    # accumulation --------------------------------------------------------

    def add_ball_segment(self, y0: float, vy: float, g: float, duration: float) -> None:
        self.ball_occupation += parabola_occupation(y0, vy, g, duration, self.ball_edges)
        first, second = height_integrals(y0, vy, g, duration)
        self.ball_height_integral += first
        self.ball_height_sq_integral += second
        self.ball_time += duration

    def add_snapshot(self, positions: np.ndarray, velocities: np.ndarray, admissible_radius: float) -> None:
        self.gas_counts += bin_counts(positions[:-1, -1], self.bin_edges)
        speeds_sq = np.einsum("ij,ij->i", velocities[:-1], velocities[:-1])
        mean_sq = float(np.mean(speeds_sq)) if speeds_sq.size else 0.0
        self.speed_sq_sum += mean_sq
        self.speed_sq_sq_sum += mean_sq * mean_sq
        ball_ke = 0.5 * self.ball_mass * float(np.dot(velocities[-1], velocities[-1]))
        self.ball_ke_sum += ball_ke
        self.ball_ke_sq_sum += ball_ke * ball_ke
        if admissible_radius > 0.0:
            u = uniform_coordinate(positions[-1:, :-1], admissible_radius)
            self.ball_x_counts += np.bincount(
                np.clip((u * UNIFORMITY_BINS).astype(int), 0, UNIFORMITY_BINS - 1), minlength=UNIFORMITY_BINS
            )
        self.observations += 1

    def merge(self, other: "EmpiricalSummary") -> "EmpiricalSummary":
        """Summary of both streams together; counts add exactly."""

        if not (
            np.array_equal(self.bin_edges, other.bin_edges) and np.array_equal(self.ball_edges, other.ball_edges)
        ):
            raise InvalidParameterError("cannot merge summaries with different bin edges")
        events = dict(self.events)
        for key, value in other.events.items():
            events[key] = events.get(key, 0) + value
        return EmpiricalSummary(
            bin_edges=self.bin_edges.copy(),
            ball_edges=self.ball_edges.copy(),
            n_particles=self.n_particles or other.n_particles,
            particle_mass=self.particle_mass or other.particle_mass,
            ball_mass=self.ball_mass or other.ball_mass,
            ball_time=self.ball_time + other.ball_time,
            ball_height_integral=self.ball_height_integral + other.ball_height_integral,
            ball_height_sq_integral=self.ball_height_sq_integral + other.ball_height_sq_integral,
            ball_occupation=self.ball_occupation + other.ball_occupation,
            gas_counts=self.gas_counts + other.gas_counts,
            ball_x_counts=self.ball_x_counts + other.ball_x_counts,
            observations=self.observations + other.observations,
            speed_sq_sum=self.speed_sq_sum + other.speed_sq_sum,
            speed_sq_sq_sum=self.speed_sq_sq_sum + other.speed_sq_sq_sum,
            ball_ke_sum=self.ball_ke_sum + other.ball_ke_sum,
            ball_ke_sq_sum=self.ball_ke_sq_sum + other.ball_ke_sq_sum,
            events=events,
            energy_drift=max(self.energy_drift, other.energy_drift),
            max_horizontal_speed=max(self.max_horizontal_speed, other.max_horizontal_speed),
            seed=self.seed if self.seed == other.seed else None,
            config_hash=self.config_hash if self.config_hash == other.config_hash else None,
        )

    def to_row(self) -> Dict[str, object]:
        """Flat scalar view used for ``summary.csv`` and ``--json``."""

        particle_ke, particle_ke_err = self.particle_ke
        literal_ke, literal_ke_err = self.particle_ke_literal
        ball_ke, ball_ke_err = self.ball_ke
        row: Dict[str, object] = {
            "config_hash": self.config_hash or "",
            "seed": "" if self.seed is None else self.seed,
            "n_particles": self.n_particles,
            "ball_time": self.ball_time,
            "ball_height_mean": self.ball_height_mean,
            "ball_height_std": self.ball_height_std,
            "observations": self.observations,
            "gas_samples": self.gas_samples,
            "particle_ke": particle_ke,
            "particle_ke_stderr": particle_ke_err,
            "particle_ke_literal": literal_ke,
            "particle_ke_literal_stderr": literal_ke_err,
            "ball_ke": ball_ke,
            "ball_ke_stderr": ball_ke_err,
            "events": self.total_events,
            "energy_drift": self.energy_drift,
            "max_horizontal_speed": self.max_horizontal_speed,
        }
        for key in sorted(self.events):
            row[f"events_{key}"] = self.events[key]
        for key in sorted(self.ks):
            row[f"ks_{key}"] = self.ks[key]
        return row


class SummaryObserver:
    """Feeds an :class:`EmpiricalSummary` from simulator callbacks after *window_start*."""

    def __init__(
        self, bin_edges: np.ndarray, *, ball_edges: Optional[np.ndarray] = None, window_start: float = 0.0
    ) -> None:
        self.summary = EmpiricalSummary(bin_edges=bin_edges, ball_edges=ball_edges)
        self.window_start = window_start
        self._admissible_radius = 0.0

    def on_start(self, state, params: ModelParams) -> None:
        self.summary.n_particles = params.n
        self.summary.particle_mass = params.particle_mass
        self.summary.ball_mass = params.M
        self._admissible_radius = params.base.admissible_radius if params.M > 0.0 else 0.0

    def on_ball_segment(self, t_start: float, t_end: float, y_start: float, vy_start: float, g: float) -> None:
        if t_end <= self.window_start:
            return
        if t_start < self.window_start:
            skip = self.window_start - t_start
            y_start = y_start + vy_start * skip - 0.5 * g * skip * skip
            vy_start = vy_start - g * skip
            t_start = self.window_start
        self.summary.add_ball_segment(y_start, vy_start, g, t_end - t_start)

    def on_sample(self, time: float, positions: np.ndarray, velocities: np.ndarray) -> None:
        if time >= self.window_start:
            self.summary.add_snapshot(positions, velocities, self._admissible_radius)

    def on_event(self, event, objects, positions, velocities) -> None:
        pass

    def on_finish(self, state, telemetry) -> None:
        counters = telemetry.snapshot()
        self.summary.events = {
            key: counters.get(key, 0)
            for key in ("particle-bottom", "particle-sidewall", "particle-ball", "ball-bottom", "ball-sidewall")
        }
        self.summary.energy_drift = telemetry.energy_drift
        self.summary.max_horizontal_speed = telemetry.max_horizontal_speed
        logger.debug("summary: %d observations, ball time %r", self.summary.observations, self.summary.ball_time)


__all__ = [
    "DEFAULT_BINS",
    "EmpiricalSummary",
    "SummaryObserver",
    "UNIFORMITY_BINS",
    "ball_bin_edges",
    "bin_counts",
    "bin_index",
    "default_bin_edges",
    "height_integrals",
    "parabola_occupation",
    "uniform_coordinate",
]
