"""Container, ball and admissibility primitives.

The container is ``D = D_b × [0, ∞)`` where the base ``D_b`` is a closed
(d−1)-dimensional ball of radius ``rho_b`` centred at the origin (for d = 2 the
interval ``[−rho_b, rho_b]``). The macroscopic ball has radius ``R`` and its
centre ranges over ``D_b' × [R, ∞)`` with ``D_b'`` the concentric base ball of
radius ``rho_b − R``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.special import gammaln

ArrayLike = Union[float, np.ndarray]


def unit_ball_volume(k: int) -> float:
    """Volume of the unit ball in ``R^k`` (``k = 0`` gives 1)."""

    return math.exp(0.5 * k * math.log(math.pi) - gammaln(0.5 * k + 1.0))


def ball_volume(k: int, radius: ArrayLike) -> ArrayLike:
    """Volume of a radius-*radius* ball in ``R^k``; vectorised over *radius*."""

    return unit_ball_volume(k) * np.power(radius, k)


class ModelParams(BaseModel):
    """Physical constants of one gas-and-ball system.

    ``R = 0`` and ``M = 0`` are accepted so the pure-gas reduction can be
    expressed with the same type.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    d: int = Field(..., ge=2, description="Spatial dimension")
    rho_b: float = Field(..., gt=0, description="Base radius")
    R: float = Field(..., ge=0, description="Ball radius")
    m: float = Field(..., gt=0, description="Total gas mass")
    M: float = Field(..., ge=0, description="Ball mass")
    g: float = Field(..., gt=0, description="Gravitational acceleration")
    E: float = Field(..., gt=0, description="Total energy")
    n: int = Field(1, ge=1, description="Particle count")

    @model_validator(mode="after")
    def validate_geometry(self) -> "ModelParams":
        if not self.rho_b > self.R:
            raise ValueError("the ball must fit strictly inside the container (rho_b > R)")
        if self.M == 0 and self.R > 0:
            raise ValueError("a ball of positive radius needs positive mass (M > 0 unless R = 0)")
        if not self.E > self.M * self.g * self.R:
            raise ValueError("total energy must exceed M·g·R")
        return self

    @property
    def particle_mass(self) -> float:
        return self.m / self.n

    @property
    def base(self) -> "BaseRegion":
        return BaseRegion(d=self.d, rho_b=self.rho_b, R=self.R)

    @property
    def base_area(self) -> float:
        """|D_b|, the (d−1)-volume of the base."""

        return float(ball_volume(self.d - 1, self.rho_b))

    @property
    def ceiling(self) -> float:
        """E/(M·g): the height the ball can never reach (``inf`` without mass)."""

        if self.M == 0:
            return math.inf
        return self.E / (self.M * self.g)

    def with_particles(self, n: int) -> "ModelParams":
        return self.model_copy(update={"n": int(n)})

    def scaled(self, factor: float) -> "ModelParams":
        """Lengths multiplied by *factor* with the energy kept consistent.

        Heights scale with lengths, so ``E`` scales too; masses and ``g`` stay.
        """

        return self.model_copy(
            update={"rho_b": self.rho_b * factor, "R": self.R * factor, "E": self.E * factor}
        )


@dataclass(frozen=True)
class BaseRegion:
    """The base ``D_b`` and the admissible ball-centre region ``D_b'``."""

    d: int
    rho_b: float
    R: float

    @property
    def area(self) -> float:
        return float(ball_volume(self.d - 1, self.rho_b))

    @property
    def admissible_radius(self) -> float:
        return self.rho_b - self.R

    @property
    def admissible_area(self) -> float:
        """|D_b'|; for d = 2 the length of ``[−(rho_b − R), rho_b − R]``."""

        return float(ball_volume(self.d - 1, self.admissible_radius))

    def contains(self, x: np.ndarray, *, slack: float = 0.0) -> np.ndarray:
        """``‖x‖ ≤ rho_b`` along the last axis."""

        return _horizontal_norm(x) <= self.rho_b + slack

    def contains_center(self, x: np.ndarray, *, slack: float = 0.0) -> np.ndarray:
        """``x ∈ D_b'`` along the last axis."""

        return _horizontal_norm(x) <= self.admissible_radius + slack


def _horizontal_norm(x: np.ndarray) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0:
        return np.abs(arr)
    return np.linalg.norm(arr, axis=-1)


def is_admissible_particle(
    x: np.ndarray,
    y: float,
    ball_center: np.ndarray,
    params: ModelParams,
) -> bool:
    """True iff ``(x, y)`` lies in ``D`` and outside the open ball."""

    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    center = np.asarray(ball_center, dtype=float)
    if float(np.linalg.norm(x_arr)) > params.rho_b or y < 0.0:
        return False
    offset = np.append(x_arr, y) - center
    return bool(float(np.dot(offset, offset)) >= params.R * params.R)


def admissible_mask(
    xs: np.ndarray,
    ys: np.ndarray,
    ball_x: np.ndarray,
    ball_y: float,
    params: ModelParams,
    *,
    slack: float = 0.0,
) -> np.ndarray:
    """Vectorised admissibility of particles ``xs`` (shape ``(n, d−1)``), ``ys``.

    *slack* loosens every constraint by the given length, which lets callers
    tolerate floating-point contact.
    """

    xs = np.asarray(xs, dtype=float).reshape(len(ys), params.d - 1)
    ys = np.asarray(ys, dtype=float)
    dx = xs - np.asarray(ball_x, dtype=float).reshape(1, params.d - 1)
    dist_sq = np.einsum("ij,ij->i", dx, dx) + (ys - ball_y) ** 2
    inside_base = np.linalg.norm(xs, axis=1) <= params.rho_b + slack
    above_floor = ys >= -slack
    outside_ball = dist_sq >= (params.R - slack) ** 2 if params.R > slack else np.ones_like(ys, dtype=bool)
    return inside_base & above_floor & outside_ball


def ball_slice_area(y_c: float, y: ArrayLike, params: ModelParams) -> ArrayLike:
    """(d−1)-volume of the horizontal section at height *y* of the ball at *y_c*."""

    y_arr = np.asarray(y, dtype=float)
    half_chord_sq = params.R * params.R - (y_arr - y_c) ** 2
    radius = np.sqrt(np.clip(half_chord_sq, 0.0, None))
    area = np.where(half_chord_sq > 0.0, ball_volume(params.d - 1, radius), 0.0)
    if np.ndim(area) == 0:
        return float(area)
    return area


__all__ = [
    "BaseRegion",
    "ModelParams",
    "admissible_mask",
    "ball_slice_area",
    "ball_volume",
    "is_admissible_particle",
    "unit_ball_volume",
]
