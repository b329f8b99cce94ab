"""Event-driven simulation of the gas particles and the ball."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence

import numpy as np

from errors import EventOrderError, InvalidParameterError, StalledSimulationError
from physics.geometry import ModelParams
from sampling.state import SystemState, kinetic_energy, potential_energy, state_violations

from .events import Event, EventKind, EventQueue
from .flight import FlightBook
from .reflection import ReflectionMode, floor_normal, reflect_wall, resolve_particle_ball, sidewall_normal, specular
from .telemetry import SimulationTelemetry

logger = logging.getLogger(__name__)

STALL_EVENTS = 1_000_000
STALL_WINDOW = 1e-12
EVENT_ENERGY_RTOL = 1e-12


class SimulationObserver:
    """Callbacks made on the simulation's own thread. Every hook is optional."""

    def on_start(self, state: SystemState, params: ModelParams) -> None:
        pass

    def on_ball_segment(self, t_start: float, t_end: float, y_start: float, vy_start: float, g: float) -> None:
        """The ball flew ballistically from *t_start* to *t_end*."""

    def on_sample(self, time: float, positions: np.ndarray, velocities: np.ndarray) -> None:
        """Snapshot at a fixed observation time."""

    def on_event(self, event: Event, objects: Sequence[int], positions: np.ndarray, velocities: np.ndarray) -> None:
        """*objects* rows right after the event was resolved."""

    def on_finish(self, state: SystemState, telemetry: SimulationTelemetry) -> None:
        pass


@dataclass
class SimulationResult:
    final_state: SystemState
    telemetry: SimulationTelemetry

    @property
    def events(self) -> int:
        return self.telemetry.counters["events"]


class Simulator:
    """Advance a :class:`SystemState` event by event.

    Particles reflect off the floor and side wall in *mode*; the ball always
    reflects specularly and collides elastically with particles.
    """

    def __init__(
        self,
        initial: SystemState,
        params: ModelParams,
        mode: ReflectionMode = ReflectionMode.SPECULAR,
        rng: Optional[np.random.Generator] = None,
        observers: Iterable[SimulationObserver] = (),
        *,
        observation_interval: Optional[float] = None,
        check_energy: bool = False,
        check_queue: bool = False,
        stall_events: int = STALL_EVENTS,
        stall_window: float = STALL_WINDOW,
    ) -> None:
        if params.d not in (2, 3):
            raise InvalidParameterError("the simulator supports d = 2 and d = 3")
        if params.M == 0.0 and params.R > 0.0:
            raise InvalidParameterError("a ball of positive radius needs positive mass")
        if initial.positions.shape != (params.n + 1, params.d):
            raise InvalidParameterError(f"state arrays must have shape {(params.n + 1, params.d)}")
        self.params = params
        self.mode = ReflectionMode.parse(mode)
        if self.mode is ReflectionMode.LAMBERTIAN and rng is None:
            raise InvalidParameterError("lambertian mode needs a seeded random generator")
        self.rng = rng
        self.observers: List[SimulationObserver] = list(observers)
        self.observation_interval = observation_interval
        self.check_energy = check_energy
        self.check_queue = check_queue
        self.stall_events = stall_events
        self.stall_window = stall_window

        self.telemetry = SimulationTelemetry()
        self.now = float(initial.time)
        self.book = FlightBook(initial, params.g, static_ball=params.M == 0.0)
        self.queue = EventQueue(self.book, params, self.telemetry)
        self.masses = np.full(params.n + 1, params.particle_mass)
        self.masses[-1] = params.M
        self._ball_gravity = 0.0 if params.M == 0.0 else params.g
        self._next_observation = math.inf
        self._stall_anchor = self.now
        self._stall_count = 0
        self._started = False

    # ------------------------------------------------------------------

    @property
    def state(self) -> SystemState:
        return self.book.to_state(self.now)

    def energy(self) -> float:
        state = self.state
        return potential_energy(state.positions, self.params) + kinetic_energy(state.velocities, self.params)

    def _start(self) -> None:
        if self._started:
            return
        self._started = True
        state = self.state
        problems = state_violations(state, self.params, energy_rtol=1e-9)
        if problems:
            raise InvalidParameterError("initial state is not admissible: " + "; ".join(problems))
        self.telemetry.start(self.energy())
        self.telemetry.observe_horizontal_speed(float(np.max(np.linalg.norm(state.velocities[:, :-1], axis=1))))
        self.queue.schedule_all(self.now)
        if self.observation_interval is not None:
            if self.observation_interval <= 0.0:
                raise InvalidParameterError("observation interval must be positive")
            self._next_observation = self.now + self.observation_interval
        for observer in self.observers:
            observer.on_start(state, self.params)
        logger.info(
            "simulation start: n=%d d=%d mode=%s energy=%r",
            self.params.n,
            self.params.d,
            self.mode.value,
            self.telemetry.initial_energy,
        )

    def _observe_until(self, t: float) -> None:
        while self._next_observation <= t:
            when = self._next_observation
            positions = self.book.positions_at(when)
            velocities = self.book.velocities_at(when)
            for observer in self.observers:
                observer.on_sample(when, positions, velocities)
            self.telemetry.incr("observations")
            self._next_observation = when + self.observation_interval

    def _close_ball_segment(self, t: float) -> None:
        ball = self.book.ball
        t_start = float(self.book.t0[ball])
        if t <= t_start:
            return
        y_start = float(self.book.p0[ball, -1])
        vy_start = float(self.book.v0[ball, -1])
        for observer in self.observers:
            observer.on_ball_segment(t_start, t, y_start, vy_start, self._ball_gravity)

    def _check_stall(self, t: float) -> None:
        if t - self._stall_anchor > self.stall_window:
            self._stall_anchor = t
            self._stall_count = 0
            return
        self._stall_count += 1
        if self._stall_count > self.stall_events:
            raise StalledSimulationError(
                f"more than {self.stall_events} events within {self.stall_window} time units near t={t!r}"
            )

    def _record_energy_change(self, before: float, after: float) -> None:
        error = abs(after - before) / self.params.E
        if error > self.telemetry.max_event_energy_error:
            self.telemetry.max_event_energy_error = error
        if self.check_energy and error > EVENT_ENERGY_RTOL:
            raise EventOrderError(f"event changed the energy by a relative {error!r}")

    def _object_energy(self, i: int) -> float:
        p = self.book.p0[i]
        v = self.book.v0[i]
        gravity = self._ball_gravity if i == self.book.ball else self.params.g
        return self.masses[i] * (0.5 * float(np.dot(v, v)) + gravity * float(p[-1]))

    # ------------------------------------------------------------------

    def step(self) -> Event:
        """Resolve the next event and return it."""

        self._start()
        if self.check_queue:
            expected = self.queue.full_recompute_next(self.now)
        event = self.queue.next_event()
        if event.time < self.now:
            raise EventOrderError(f"event at {event.time!r} precedes the current time {self.now!r}")
        if self.check_queue and (
            expected.kind is not event.kind
            or expected.index != event.index
            or abs(expected.time - event.time) > 1e-9 * max(1.0, abs(event.time))
        ):
            raise EventOrderError(f"lazy queue returned {event!r}, full recompute gives {expected!r}")
        self._observe_until(event.time)
        self._check_stall(event.time)
        self.now = event.time
        objects = self._resolve(event)
        self.telemetry.incr("events")
        self.telemetry.incr(event.kind.value)
        if self.observers:
            rows = np.asarray(objects)
            positions, velocities = self.book.rows_at(rows, self.now)
            for observer in self.observers:
                observer.on_event(event, objects, positions, velocities)
        return event

    def _resolve(self, event: Event) -> List[int]:
        t = event.time
        book = self.book
        ball = book.ball
        d = self.params.d

        if event.kind in (EventKind.PARTICLE_BOTTOM, EventKind.PARTICLE_SIDEWALL):
            i = int(event.index)
            book.rebase(i, t)
            before = self._object_energy(i)
            if event.kind is EventKind.PARTICLE_BOTTOM:
                book.p0[i, -1] = 0.0
                normal = floor_normal(d)
            else:
                normal = sidewall_normal(book.p0[i, :-1])
            book.v0[i] = reflect_wall(book.v0[i], normal, self.mode, self.rng)
            self._record_energy_change(before, self._object_energy(i))
            self.telemetry.observe_horizontal_speed(float(np.linalg.norm(book.v0[i, :-1])))
            self.queue.schedule_particle(i, t)
            return [i]

        if event.kind is EventKind.PARTICLE_BALL:
            i = int(event.index)
            self._close_ball_segment(t)
            book.rebase(i, t)
            book.rebase(ball, t)
            before = self._object_energy(i) + self._object_energy(ball)
            offset = book.p0[i] - book.p0[ball]
            normal = offset / float(np.linalg.norm(offset))
            book.v0[i], book.v0[ball] = resolve_particle_ball(
                book.v0[i], book.v0[ball], normal, self.masses[i], self.masses[ball]
            )
            self._record_energy_change(before, self._object_energy(i) + self._object_energy(ball))
            self.telemetry.observe_horizontal_speed(float(np.linalg.norm(book.v0[i, :-1])))
            self.telemetry.observe_horizontal_speed(float(np.linalg.norm(book.v0[ball, :-1])))
            self.queue.schedule_particle(i, t, contact=False)
            self.queue.schedule_ball(t)
            return [i, ball]

        self._close_ball_segment(t)
        book.rebase(ball, t)
        before = self._object_energy(ball)
        if event.kind is EventKind.BALL_BOTTOM:
            book.p0[ball, -1] = self.params.R
            normal = floor_normal(d)
        else:
            normal = sidewall_normal(book.p0[ball, :-1])
        book.v0[ball] = specular(book.v0[ball], normal)
        self._record_energy_change(before, self._object_energy(ball))
        self.telemetry.observe_horizontal_speed(float(np.linalg.norm(book.v0[ball, :-1])))
        self.queue.schedule_ball(t)
        return [ball]

    def run(self, duration: float) -> SimulationResult:
        """Advance by *duration* and hand the final state to the observers."""

        if duration < 0.0:
            raise InvalidParameterError("duration must be non-negative")
        self._start()
        end = self.now + duration
        while self.queue.peek_time() <= end:
            self.step()
        return self._finish(end)

    def run_events(self, count: int) -> SimulationResult:
        """Resolve exactly *count* events."""

        self._start()
        for _ in range(count):
            self.step()
        return self._finish(self.now)

    def _finish(self, end: float) -> SimulationResult:
        self._observe_until(end)
        self._close_ball_segment(end)
        self.now = end
        self.book.rebase_all(end)
        self.queue.schedule_all(end)
        final = self.state
        self.telemetry.finish(self.energy(), end)
        for observer in self.observers:
            observer.on_finish(final, self.telemetry)
        logger.info(
            "simulation finished at t=%r after %d events (energy drift %.3e)",
            end,
            self.telemetry.counters["events"],
            self.telemetry.energy_drift,
        )
        return SimulationResult(final_state=final, telemetry=self.telemetry)


def simulate(
    initial: SystemState,
    duration: float,
    mode: ReflectionMode,
    rng: Optional[np.random.Generator],
    observers: Iterable[SimulationObserver] = (),
    *,
    params: ModelParams,
    observation_interval: Optional[float] = None,
    window_start: float = 0.0,
    bin_edges: Optional[np.ndarray] = None,
    ball_edges: Optional[np.ndarray] = None,
):
    """Run a simulation and summarise it.

    A :class:`~observables.summary.SummaryObserver` is attached next to
    *observers*; its :class:`~observables.summary.EmpiricalSummary` is returned.
    Observations are taken every ``duration / 10⁵`` unless
    *observation_interval* is given. Gas heights are binned on *bin_edges* and
    ball heights on *ball_edges*, which default to the same number of bins over
    ``[R, E/(Mg)]``.
    """

    from observables.summary import SummaryObserver, ball_bin_edges, default_bin_edges

    if observation_interval is None:
        observation_interval = duration / 100_000 if duration > 0.0 else None
    if bin_edges is None:
        bin_edges = default_bin_edges(params)
    if ball_edges is None:
        ball_edges = ball_bin_edges(params, len(bin_edges) - 1)
    summary_observer = SummaryObserver(bin_edges, ball_edges=ball_edges, window_start=initial.time + window_start)
    sim = Simulator(
        initial,
        params,
        mode,
        rng,
        [summary_observer, *observers],
        observation_interval=observation_interval,
    )
    sim.run(duration)
    return summary_observer.summary


__all__ = [
    "EVENT_ENERGY_RTOL",
    "STALL_EVENTS",
    "STALL_WINDOW",
    "SimulationObserver",
    "SimulationResult",
    "Simulator",
    "simulate",
]
