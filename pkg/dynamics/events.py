"""Event scheduling with lazy invalidation.

Heap entries are plain tuples ``(time, rank, index, particle_stamp, ball_epoch)``
so the heap orders ties deterministically by kind and index. An entry is stale
when the particle it names has moved on to a new segment (stamp mismatch) or,
for particle–ball entries, when the ball changed velocity after it was pushed
(epoch mismatch).
"""
from __future__ import annotations

import heapq
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np

from errors import EventOrderError
from physics.geometry import ModelParams

from .flight import FlightBook
from .kernels import floor_time, floor_times, sidewall_time, sidewall_times, times_to_ball
from .telemetry import SimulationTelemetry

logger = logging.getLogger(__name__)

COMPACT_FACTOR = 8


class EventKind(str, Enum):
    PARTICLE_BOTTOM = "particle-bottom"
    PARTICLE_SIDEWALL = "particle-sidewall"
    PARTICLE_BALL = "particle-ball"
    BALL_BOTTOM = "ball-bottom"
    BALL_SIDEWALL = "ball-sidewall"

    @property
    def rank(self) -> int:
        return _RANKS[self]

    @property
    def involves_ball(self) -> bool:
        return self in (EventKind.PARTICLE_BALL, EventKind.BALL_BOTTOM, EventKind.BALL_SIDEWALL)


_RANKS = {kind: rank for rank, kind in enumerate(EventKind)}
_KINDS = list(EventKind)


@dataclass(frozen=True)
class Event:
    time: float
    kind: EventKind
    index: Optional[int]
    stamp: int

    def key(self) -> Tuple[float, int, int]:
        return (self.time, self.kind.rank, -1 if self.index is None else self.index)


class EventQueue:
    """Indexed priority queue over the next event of every object."""

    def __init__(
        self,
        book: FlightBook,
        params: ModelParams,
        telemetry: Optional[SimulationTelemetry] = None,
    ) -> None:
        self.book = book
        self.params = params
        self.telemetry = telemetry or SimulationTelemetry()
        self.n = book.size - 1
        self.contacts = params.R > 0.0
        self.ball_moves = params.M > 0.0
        self.stamps = np.zeros(self.n, dtype=np.int64)
        self.wall_times = np.full(self.n, math.inf)
        self.ball_epoch = 0
        self._heap: List[tuple] = []

    def __len__(self) -> int:
        return len(self._heap)

    # scheduling ----------------------------------------------------------

    def _push(self, time: float, kind: EventKind, index: int, stamp: int, epoch: int) -> None:
        heapq.heappush(self._heap, (time, kind.rank, index, stamp, epoch))

    def _wall_event(self, i: int) -> Tuple[float, EventKind]:
        p0, v0, t0 = self.book.p0[i], self.book.v0[i], self.book.t0[i]
        bottom = floor_time(p0[-1], v0[-1], self.params.g)
        side = sidewall_time(p0[:-1], v0[:-1], self.params.rho_b)
        if side < bottom:
            return t0 + side, EventKind.PARTICLE_SIDEWALL
        return t0 + bottom, EventKind.PARTICLE_BOTTOM

    def _contact_times(self, rows: np.ndarray, now: float) -> np.ndarray:
        pos, vel = self.book.rows_at(rows, now)
        ball_pos = self.book.position(self.book.ball, now)
        ball_vel = self.book.velocity(self.book.ball, now)
        return now + times_to_ball(pos - ball_pos, vel - ball_vel, self.params.R)

    def schedule_particle(self, i: int, now: float, *, contact: bool = True) -> None:
        """Invalidate every entry of particle *i* and push its next events."""

        self.stamps[i] += 1
        stamp = int(self.stamps[i])
        time, kind = self._wall_event(i)
        self.wall_times[i] = time
        self._push(time, kind, i, stamp, self.ball_epoch)
        if contact and self.contacts:
            hit = float(self._contact_times(np.array([i]), now)[0])
            if hit < time:
                self._push(hit, EventKind.PARTICLE_BALL, i, stamp, self.ball_epoch)

    def schedule_ball(self, now: float) -> None:
        """New ball segment: bump the epoch, push its wall event and every contact."""

        self.ball_epoch += 1
        self.telemetry.incr("ball_epochs")
        ball = self.book.ball
        if self.ball_moves:
            p0, v0, t0 = self.book.p0[ball], self.book.v0[ball], self.book.t0[ball]
            bottom = floor_time(p0[-1] - self.params.R, v0[-1], self.params.g)
            side = sidewall_time(p0[:-1], v0[:-1], self.params.rho_b - self.params.R)
            if side < bottom:
                self._push(t0 + side, EventKind.BALL_SIDEWALL, ball, 0, self.ball_epoch)
            else:
                self._push(t0 + bottom, EventKind.BALL_BOTTOM, ball, 0, self.ball_epoch)
        if self.contacts and self.n:
            rows = np.arange(self.n)
            hits = self._contact_times(rows, now)
            for i in np.flatnonzero(hits < self.wall_times):
                self._push(float(hits[i]), EventKind.PARTICLE_BALL, int(i), int(self.stamps[i]), self.ball_epoch)
        self._maybe_compact()

    def schedule_all(self, now: float) -> None:
        for i in range(self.n):
            self.schedule_particle(i, now, contact=False)
        self.schedule_ball(now)

    # popping -------------------------------------------------------------

    def _is_valid(self, entry: tuple) -> bool:
        _, rank, index, stamp, epoch = entry
        kind = _KINDS[rank]
        if kind in (EventKind.BALL_BOTTOM, EventKind.BALL_SIDEWALL):
            return epoch == self.ball_epoch
        if stamp != self.stamps[index]:
            return False
        return kind is not EventKind.PARTICLE_BALL or epoch == self.ball_epoch

    def _discard_stale(self) -> None:
        while self._heap and not self._is_valid(self._heap[0]):
            heapq.heappop(self._heap)
            self.telemetry.incr("stale_pops")

    def peek_time(self) -> float:
        self._discard_stale()
        if not self._heap:
            raise EventOrderError("event queue is empty")
        return self._heap[0][0]

    def next_event(self) -> Event:
        """Pop the earliest valid event."""

        self._discard_stale()
        if not self._heap:
            raise EventOrderError("event queue is empty")
        time, rank, index, stamp, epoch = heapq.heappop(self._heap)
        kind = _KINDS[rank]
        return Event(
            time=time,
            kind=kind,
            index=None if kind in (EventKind.BALL_BOTTOM, EventKind.BALL_SIDEWALL) else index,
            stamp=epoch,
        )

    def _maybe_compact(self) -> None:
        if len(self._heap) <= COMPACT_FACTOR * (self.n + 1) + 1024:
            return
        self._heap = [entry for entry in self._heap if self._is_valid(entry)]
        heapq.heapify(self._heap)
        self.telemetry.incr("heap_compactions")
        logger.debug("compacted event heap to %d entries", len(self._heap))

    # reference -----------------------------------------------------------

    def full_recompute_next(self, now: float) -> Event:
        """Earliest event computed from scratch at time *now*, ignoring the heap."""

        params = self.params
        pos = self.book.positions_at(now)
        vel = self.book.velocities_at(now)
        candidates: List[Tuple[float, int, int]] = []
        if self.n:
            rows = slice(0, self.n)
            bottoms = floor_times(pos[rows, -1], vel[rows, -1], params.g)
            sides = sidewall_times(pos[rows, :-1], vel[rows, :-1], params.rho_b)
            for i in range(self.n):
                if sides[i] < bottoms[i]:
                    candidates.append((now + float(sides[i]), EventKind.PARTICLE_SIDEWALL.rank, i))
                else:
                    candidates.append((now + float(bottoms[i]), EventKind.PARTICLE_BOTTOM.rank, i))
            if self.contacts:
                hits = times_to_ball(pos[rows] - pos[-1], vel[rows] - vel[-1], params.R)
                for i in np.flatnonzero(np.isfinite(hits)):
                    candidates.append((now + float(hits[i]), EventKind.PARTICLE_BALL.rank, int(i)))
        if self.ball_moves:
            ball = self.book.ball
            bottom = floor_time(pos[ball, -1] - params.R, vel[ball, -1], params.g)
            side = sidewall_time(pos[ball, :-1], vel[ball, :-1], params.rho_b - params.R)
            if side < bottom:
                candidates.append((now + side, EventKind.BALL_SIDEWALL.rank, ball))
            else:
                candidates.append((now + bottom, EventKind.BALL_BOTTOM.rank, ball))
        if not candidates:
            raise EventOrderError("no event can occur")
        time, rank, index = min(candidates)
        kind = _KINDS[rank]
        return Event(
            time=time,
            kind=kind,
            index=None if kind in (EventKind.BALL_BOTTOM, EventKind.BALL_SIDEWALL) else index,
            stamp=self.ball_epoch,
        )


__all__ = ["Event", "EventKind", "EventQueue"]
