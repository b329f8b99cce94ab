"""Trajectory and event-log dumps, and a brute-force stepping oracle."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq

from artifacts import ArtifactHeader, write_csv
from errors import EventOrderError
from physics.geometry import ModelParams
from sampling.state import SystemState

from .events import Event, EventKind
from .kernels import free_flight
from .reflection import floor_normal, resolve_particle_ball, sidewall_normal, specular
from .simulator import SimulationObserver
from .telemetry import SimulationTelemetry

logger = logging.getLogger(__name__)


def trajectory_columns(d: int) -> List[str]:
    return ["t", "object"] + [f"x{k + 1}" for k in range(d - 1)] + ["y"] + [f"v{k + 1}" for k in range(d)]


class TrajectoryRecorder(SimulationObserver):
    """Rows ``(t, object, x…, y, v…)`` for every object touched by an event."""

    def __init__(self, path: Path, header: ArtifactHeader) -> None:
        self.path = Path(path)
        self.header = header
        self.rows: List[list] = []
        self.d = 0

    def on_start(self, state: SystemState, params: ModelParams) -> None:
        self.d = params.d
        for obj in range(state.positions.shape[0]):
            self.rows.append([state.time, obj, *state.positions[obj], *state.velocities[obj]])

    def on_event(self, event: Event, objects: Sequence[int], positions: np.ndarray, velocities: np.ndarray) -> None:
        for row, obj in enumerate(objects):
            self.rows.append([event.time, obj, *positions[row], *velocities[row]])

    def on_finish(self, state: SystemState, telemetry: SimulationTelemetry) -> None:
        write_csv(self.path, self.header, trajectory_columns(self.d), self.rows)


class EventLogRecorder(SimulationObserver):
    """Rows ``(t, kind, index)``; ball-only events leave the index empty."""

    def __init__(self, path: Path, header: ArtifactHeader) -> None:
        self.path = Path(path)
        self.header = header
        self.rows: List[list] = []

    def on_event(self, event: Event, objects: Sequence[int], positions: np.ndarray, velocities: np.ndarray) -> None:
        self.rows.append([event.time, event.kind.value, "" if event.index is None else event.index])

    def on_finish(self, state: SystemState, telemetry: SimulationTelemetry) -> None:
        write_csv(self.path, self.header, ["t", "kind", "index"], self.rows)


# ----------------------------------------------------------------------
# stepping oracle

DENSE_STEP = 0.01
ROOT_XTOL = 1e-15


@dataclass(frozen=True)
class DenseEvent:
    time: float
    kind: EventKind
    index: Optional[int]


def _flown(state: SystemState, tau: float, g: float) -> SystemState:
    return free_flight(state.copy(), tau, g)


def _gap_functions(state: SystemState, params: ModelParams) -> List[Tuple[EventKind, Optional[int], Callable[[float], float]]]:
    """Separation functions of the flight time; an event is a crossing from ≥ 0 to < 0."""

    g = params.g
    n = state.n_particles
    p, v = state.positions, state.velocities
    gaps: List[Tuple[EventKind, Optional[int], Callable[[float], float]]] = []

    def height(i: int, floor: float) -> Callable[[float], float]:
        return lambda tau: p[i, -1] + v[i, -1] * tau - 0.5 * g * tau * tau - floor

    def inside_wall(i: int, radius: float) -> Callable[[float], float]:
        def gap(tau: float) -> float:
            x = p[i, :-1] + v[i, :-1] * tau
            return radius * radius - float(np.dot(x, x))
        return gap

    def outside_ball(i: int) -> Callable[[float], float]:
        dp, dv = p[i] - p[n], v[i] - v[n]

        def gap(tau: float) -> float:
            rel = dp + dv * tau
            return float(np.dot(rel, rel)) - params.R * params.R
        return gap

    for i in range(n):
        gaps.append((EventKind.PARTICLE_BOTTOM, i, height(i, 0.0)))
        gaps.append((EventKind.PARTICLE_SIDEWALL, i, inside_wall(i, params.rho_b)))
        if params.R > 0.0:
            gaps.append((EventKind.PARTICLE_BALL, i, outside_ball(i)))
    if params.M > 0.0:
        gaps.append((EventKind.BALL_BOTTOM, None, height(n, params.R)))
        gaps.append((EventKind.BALL_SIDEWALL, None, inside_wall(n, params.rho_b - params.R)))
    return gaps


def _first_crossing(
    kind: EventKind,
    index: Optional[int],
    gap: Callable[[float], float],
    state: SystemState,
    lo: float,
    hi: float,
) -> Optional[float]:
    upper = hi
    if kind is EventKind.PARTICLE_BALL:
        # relative motion is linear: the separation is convex with its minimum at closest approach
        n = state.n_particles
        dp = state.positions[index] - state.positions[n]
        dv = state.velocities[index] - state.velocities[n]
        speed_sq = float(np.dot(dv, dv))
        if speed_sq == 0.0 or float(np.dot(dp + dv * lo, dv)) >= 0.0:
            return None
        upper = min(max(-float(np.dot(dp, dv)) / speed_sq, lo), hi)
    if gap(upper) >= 0.0:
        return None
    if gap(lo) <= 0.0:
        return lo
    return brentq(gap, lo, upper, xtol=ROOT_XTOL)


def dense_next_event(
    state: SystemState,
    params: ModelParams,
    *,
    dt: float = DENSE_STEP,
    horizon: float = 1e6,
) -> DenseEvent:
    """Next event found by stepping the flight time in increments of *dt*.

    Crossings are located by root bracketing on the raw separation functions,
    independently of the closed-form kernels.
    """

    gaps = _gap_functions(state, params)
    lo = 0.0
    while lo < horizon:
        hi = lo + dt
        best: Optional[Tuple[float, int, int]] = None
        found: Optional[DenseEvent] = None
        for kind, index, gap in gaps:
            tau = _first_crossing(kind, index, gap, state, lo, hi)
            if tau is None:
                continue
            key = (tau, kind.rank, -1 if index is None else index)
            if best is None or key < best:
                best = key
                found = DenseEvent(time=state.time + tau, kind=kind, index=index)
        if found is not None:
            return found
        lo = hi
    raise EventOrderError(f"no event within a flight time of {horizon}")


def apply_dense_event(state: SystemState, event: DenseEvent, params: ModelParams) -> SystemState:
    """Fly to *event* and resolve it specularly."""

    out = _flown(state, event.time - state.time, params.g)
    out.time = event.time
    n = out.n_particles
    d = params.d
    if event.kind is EventKind.PARTICLE_BOTTOM:
        out.velocities[event.index] = specular(out.velocities[event.index], floor_normal(d))
    elif event.kind is EventKind.PARTICLE_SIDEWALL:
        out.velocities[event.index] = specular(out.velocities[event.index], sidewall_normal(out.positions[event.index, :-1]))
    elif event.kind is EventKind.PARTICLE_BALL:
        i = event.index
        offset = out.positions[i] - out.positions[n]
        normal = offset / float(np.linalg.norm(offset))
        out.velocities[i], out.velocities[n] = resolve_particle_ball(
            out.velocities[i], out.velocities[n], normal, params.particle_mass, params.M
        )
    elif event.kind is EventKind.BALL_BOTTOM:
        out.velocities[n] = specular(out.velocities[n], floor_normal(d))
    else:
        out.velocities[n] = specular(out.velocities[n], sidewall_normal(out.positions[n, :-1]))
    return out


def dense_integrate(
    initial: SystemState,
    params: ModelParams,
    duration: float,
    *,
    dt: float = DENSE_STEP,
) -> Tuple[SystemState, List[DenseEvent]]:
    """Specular trajectory over *duration* built only from the stepping oracle."""

    state = initial.copy()
    end = initial.time + duration
    events: List[DenseEvent] = []
    while True:
        event = dense_next_event(state, params, dt=dt)
        if event.time > end:
            break
        state = apply_dense_event(state, event, params)
        events.append(event)
    final = _flown(state, end - state.time, params.g)
    final.time = end
    logger.debug("dense integration produced %d events", len(events))
    return final, events


__all__ = [
    "DENSE_STEP",
    "DenseEvent",
    "EventLogRecorder",
    "TrajectoryRecorder",
    "apply_dense_event",
    "dense_integrate",
    "dense_next_event",
    "trajectory_columns",
]
