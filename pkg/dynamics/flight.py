"""Per-object ballistic segments.

Objects are only touched when one of their own events fires; in between, the
position of object ``i`` at time ``t`` follows from its segment start
``(p0[i], v0[i], t0[i])``.
"""
from __future__ import annotations

import numpy as np

from sampling.state import SystemState

from .kernels import flight_positions


class FlightBook:
    def __init__(self, state: SystemState, g: float, *, static_ball: bool = False) -> None:
        self.p0 = np.array(state.positions, dtype=float, copy=True)
        self.v0 = np.array(state.velocities, dtype=float, copy=True)
        self.t0 = np.full(self.p0.shape[0], float(state.time))
        self.g = float(g)
        self.static_ball = static_ball
        if static_ball:
            self.v0[-1] = 0.0

    @property
    def size(self) -> int:
        return self.p0.shape[0]

    @property
    def ball(self) -> int:
        return self.p0.shape[0] - 1

    def _gravity(self, rows: np.ndarray) -> np.ndarray:
        gravity = np.full(rows.shape[0], self.g)
        if self.static_ball:
            gravity[rows == self.ball] = 0.0
        return gravity

    def positions_at(self, t: float) -> np.ndarray:
        dt = t - self.t0
        out = self.p0 + self.v0 * dt[:, np.newaxis]
        gravity = self._gravity(np.arange(self.size))
        out[:, -1] -= 0.5 * gravity * dt * dt
        return out

    def velocities_at(self, t: float) -> np.ndarray:
        gravity = self._gravity(np.arange(self.size))
        out = self.v0.copy()
        out[:, -1] -= gravity * (t - self.t0)
        return out

    def rows_at(self, rows: np.ndarray, t: float) -> tuple:
        """Positions and velocities of *rows* at time *t*."""

        dt = t - self.t0[rows]
        gravity = self._gravity(rows)
        pos = self.p0[rows] + self.v0[rows] * dt[:, np.newaxis]
        pos[:, -1] -= 0.5 * gravity * dt * dt
        vel = self.v0[rows].copy()
        vel[:, -1] -= gravity * dt
        return pos, vel

    def position(self, i: int, t: float) -> np.ndarray:
        if self.static_ball and i == self.ball:
            return self.p0[i].copy()
        return flight_positions(self.p0[i], self.v0[i], np.asarray(t - self.t0[i]), self.g)

    def velocity(self, i: int, t: float) -> np.ndarray:
        vel = self.v0[i].copy()
        if not (self.static_ball and i == self.ball):
            vel[-1] -= self.g * (t - self.t0[i])
        return vel

    def rebase(self, i: int, t: float) -> None:
        """Start a new segment for object *i* at time *t*."""

        self.p0[i] = self.position(i, t)
        self.v0[i] = self.velocity(i, t)
        self.t0[i] = t

    def rebase_all(self, t: float) -> None:
        self.p0 = self.positions_at(t)
        self.v0 = self.velocities_at(t)
        self.t0[:] = t

    def to_state(self, t: float) -> SystemState:
        return SystemState(self.positions_at(t), self.velocities_at(t), float(t))


__all__ = ["FlightBook"]
