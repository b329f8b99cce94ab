"""Velocity updates at walls and at particle–ball contacts."""
from __future__ import annotations

import math
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from errors import EventOrderError, ModeMismatchError


class ReflectionMode(str, Enum):
    SPECULAR = "specular"
    LAMBERTIAN = "lambertian"

    @classmethod
    def parse(cls, value: "str | ReflectionMode") -> "ReflectionMode":
        if isinstance(value, ReflectionMode):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError as exc:
            raise ModeMismatchError(f"unknown reflection mode '{value}'") from exc


def resolve_particle_ball(
    v: np.ndarray,
    V: np.ndarray,
    normal: np.ndarray,
    m_i: float,
    M: float,
) -> Tuple[np.ndarray, np.ndarray]:
    """Elastic exchange of the normal velocity components; tangential parts are untouched.

    *normal* is the unit vector from the ball centre to the particle.
    """

    v_n = float(np.dot(v, normal))
    V_n = float(np.dot(V, normal))
    if v_n - V_n >= 0.0:
        raise EventOrderError(f"particle–ball contact is not approaching (relative normal speed {v_n - V_n!r})")
    total = m_i + M
    v_n_new = ((m_i - M) * v_n + 2.0 * M * V_n) / total
    V_n_new = ((M - m_i) * V_n + 2.0 * m_i * v_n) / total
    return v + (v_n_new - v_n) * normal, V + (V_n_new - V_n) * normal


def specular(velocity: np.ndarray, normal: np.ndarray) -> np.ndarray:
    return velocity - 2.0 * float(np.dot(velocity, normal)) * normal


def lambertian_direction(normal: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Unit vector with density ∝ cosθ·sin^{d−2}θ about *normal*, uniform azimuth."""

    d = normal.shape[0]
    sin_theta = rng.random() ** (1.0 / (d - 1))
    cos_theta = math.sqrt(max(1.0 - sin_theta * sin_theta, 0.0))
    tangent = rng.standard_normal(d)
    tangent -= float(np.dot(tangent, normal)) * normal
    length = float(np.linalg.norm(tangent))
    while length == 0.0:
        tangent = rng.standard_normal(d)
        tangent -= float(np.dot(tangent, normal)) * normal
        length = float(np.linalg.norm(tangent))
    return cos_theta * normal + sin_theta * (tangent / length)


def reflect_wall(
    velocity: np.ndarray,
    normal: np.ndarray,
    mode: ReflectionMode,
    rng: Optional[np.random.Generator] = None,
    *,
    is_ball: bool = False,
) -> np.ndarray:
    """Outgoing velocity at a wall whose inner unit normal is *normal*."""

    mode = ReflectionMode.parse(mode)
    if mode is ReflectionMode.SPECULAR:
        return specular(velocity, normal)
    if is_ball:
        raise ModeMismatchError("the ball always reflects specularly")
    if rng is None:
        raise ModeMismatchError("lambertian reflection needs a random generator")
    speed = float(np.linalg.norm(velocity))
    return speed * lambertian_direction(normal, rng)


def floor_normal(d: int) -> np.ndarray:
    normal = np.zeros(d)
    normal[-1] = 1.0
    return normal


def sidewall_normal(horizontal: np.ndarray) -> np.ndarray:
    """Inner normal of the side wall at horizontal position *horizontal*."""

    length = float(np.linalg.norm(horizontal))
    normal = np.zeros(horizontal.shape[0] + 1)
    if length > 0.0:
        normal[:-1] = -horizontal / length
    return normal


__all__ = [
    "ReflectionMode",
    "floor_normal",
    "lambertian_direction",
    "reflect_wall",
    "resolve_particle_ball",
    "sidewall_normal",
    "specular",
]
