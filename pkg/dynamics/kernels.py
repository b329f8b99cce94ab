"""Closed-form flight and collision-time kernels.

Every object feels the same acceleration ``(0, …, 0, −g)``, so horizontal
motion is linear, heights follow parabolas and the relative motion of any two
objects is linear.
"""
from __future__ import annotations

import math
from typing import Optional

import numpy as np

from sampling.state import SystemState

GRAZING_RTOL = 1e-12


def free_flight(state: SystemState, dt: float, g: float) -> SystemState:
    """Advance every object by *dt* along its ballistic path (in place)."""

    if dt < 0.0:
        raise ValueError("flight time must be non-negative")
    state.positions[:, :-1] += state.velocities[:, :-1] * dt
    state.positions[:, -1] += state.velocities[:, -1] * dt - 0.5 * g * dt * dt
    state.velocities[:, -1] -= g * dt
    state.time += dt
    return state


def flight_positions(p0: np.ndarray, v0: np.ndarray, dt: np.ndarray, g: float) -> np.ndarray:
    """Positions after per-row flight times *dt* (shape ``(N,)``) without mutating inputs."""

    dt = np.asarray(dt, dtype=float)
    out = p0 + v0 * dt[..., np.newaxis]
    out[..., -1] -= 0.5 * g * dt * dt
    return out


def floor_time(height: float, vy: float, g: float) -> float:
    """Time until a parabola at *height* above the floor comes down to it.

    Uses the cancellation-free root when falling.
    """

    h = max(height, 0.0)
    root = math.sqrt(vy * vy + 2.0 * g * h)
    if vy > 0.0:
        return (vy + root) / g
    denom = root - vy
    return 0.0 if denom == 0.0 else 2.0 * h / denom


def floor_times(heights: np.ndarray, vys: np.ndarray, g: float) -> np.ndarray:
    h = np.maximum(heights, 0.0)
    root = np.sqrt(vys * vys + 2.0 * g * h)
    rising = (vys + root) / g
    denom = root - vys
    with np.errstate(divide="ignore", invalid="ignore"):
        falling = np.where(denom > 0.0, 2.0 * h / denom, 0.0)
    return np.where(vys > 0.0, rising, falling)


def sidewall_time(x: np.ndarray, vx: np.ndarray, radius: float) -> float:
    """Time until the horizontal ray ``x + vx·t`` leaves the disc of *radius* (``inf`` if never)."""

    a = float(np.dot(vx, vx))
    if a == 0.0:
        return math.inf
    b = float(np.dot(x, vx))
    c = float(np.dot(x, x)) - radius * radius
    disc = max(b * b - a * c, 0.0)
    root = math.sqrt(disc)
    if b > 0.0:
        return max(-c / (b + root), 0.0)
    return (root - b) / a


def sidewall_times(xs: np.ndarray, vxs: np.ndarray, radius: float) -> np.ndarray:
    a = np.einsum("ij,ij->i", vxs, vxs)
    b = np.einsum("ij,ij->i", xs, vxs)
    c = np.einsum("ij,ij->i", xs, xs) - radius * radius
    root = np.sqrt(np.maximum(b * b - a * c, 0.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        outgoing = np.maximum(-c / (b + root), 0.0)
        incoming = (root - b) / a
    times = np.where(b > 0.0, outgoing, incoming)
    return np.where(a > 0.0, times, np.inf)


def time_to_ball(dp: np.ndarray, dv: np.ndarray, R: float) -> Optional[float]:
    """First contact time of relative position *dp* moving with *dv* against a sphere of radius *R*.

    ``None`` when the pair separates, misses, or only grazes.
    """

    b = float(np.dot(dp, dv))
    if b >= 0.0:
        return None
    a = float(np.dot(dv, dv))
    c = float(np.dot(dp, dp)) - R * R
    disc = b * b - a * c
    if disc <= GRAZING_RTOL * a * R * R:
        return None
    return max(c / (math.sqrt(disc) - b), 0.0)


def times_to_ball(dps: np.ndarray, dvs: np.ndarray, R: float) -> np.ndarray:
    """Vectorised :func:`time_to_ball`; ``inf`` where there is no contact."""

    b = np.einsum("ij,ij->i", dps, dvs)
    a = np.einsum("ij,ij->i", dvs, dvs)
    c = np.einsum("ij,ij->i", dps, dps) - R * R
    disc = b * b - a * c
    hit = (b < 0.0) & (disc > GRAZING_RTOL * a * R * R)
    with np.errstate(invalid="ignore", divide="ignore"):
        times = np.maximum(c / (np.sqrt(np.where(hit, disc, 0.0)) - b), 0.0)
    return np.where(hit, times, np.inf)


__all__ = [
    "GRAZING_RTOL",
    "flight_positions",
    "floor_time",
    "floor_times",
    "free_flight",
    "sidewall_time",
    "sidewall_times",
    "time_to_ball",
    "times_to_ball",
]
