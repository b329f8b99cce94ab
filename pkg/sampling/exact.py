"""Exact samplers: velocities on the energy sphere and the limiting gas measure ν."""
from __future__ import annotations

import math
from typing import Tuple

import numpy as np

from errors import EnergyExhaustedError, InvalidParameterError
from physics.gas_analytics import sample_base_points
from physics.geometry import ModelParams, admissible_mask


def sample_velocities(potential_energy: float, params: ModelParams, rng: np.random.Generator) -> np.ndarray:
    """Velocities, shape ``(n+1, d)``, uniform on the sphere ``Σ mᵢ‖vᵢ‖²/2 = E − PE``.

    A massless ball is held at rest and excluded from the sphere.
    """

    budget = params.E - potential_energy
    if not budget > 0.0:
        raise EnergyExhaustedError(f"potential energy {potential_energy!r} leaves no kinetic energy")
    n, d = params.n, params.d
    moving = n + 1 if params.M > 0.0 else n
    w = rng.standard_normal((moving, d))
    w *= math.sqrt(2.0 * budget) / float(np.linalg.norm(w))
    masses = np.full(moving, params.particle_mass)
    if moving == n + 1:
        masses[-1] = params.M
    velocities = np.zeros((n + 1, d))
    velocities[:moving] = w / np.sqrt(masses)[:, np.newaxis]
    return velocities


def _check_nu_arguments(ball_x: np.ndarray, ball_y: float, lam: float, params: ModelParams) -> np.ndarray:
    if not lam > 0.0:
        raise InvalidParameterError(f"rate must be positive, got {lam!r}")
    if ball_y < params.R:
        raise InvalidParameterError(f"ball height {ball_y!r} lies below its radius")
    center = np.asarray(ball_x, dtype=float).reshape(params.d - 1)
    if float(np.linalg.norm(center)) > params.base.admissible_radius + 1e-12:
        raise InvalidParameterError("ball centre lies outside the admissible base region")
    return center


def draw_nu(
    ball_x: np.ndarray,
    ball_y: float,
    lam: float,
    params: ModelParams,
    rng: np.random.Generator,
    size: int,
) -> Tuple[np.ndarray, np.ndarray, int]:
    """Rejection draws from ν; returns ``(xs, ys, attempts)``.

    ``size / attempts`` estimates ``q/|D_b|``.
    """

    center = _check_nu_arguments(ball_x, ball_y, lam, params)
    xs = np.empty((size, params.d - 1))
    ys = np.empty(size)
    filled = 0
    attempts = 0
    while filled < size:
        batch = max(64, int(1.25 * (size - filled)) + 16)
        cand_x = sample_base_points(rng, (batch,), params.d, params.rho_b)
        cand_y = rng.exponential(1.0 / lam, size=batch)
        ok = admissible_mask(cand_x, cand_y, center, ball_y, params)
        accepted = np.flatnonzero(ok)
        take = accepted[: size - filled]
        # attempts up to and including the last accepted candidate
        attempts += batch if len(take) == len(accepted) else int(take[-1]) + 1
        xs[filled : filled + len(take)] = cand_x[take]
        ys[filled : filled + len(take)] = cand_y[take]
        filled += len(take)
    return xs, ys, attempts


def sample_nu(
    ball_x: np.ndarray,
    ball_y: float,
    lam: float,
    params: ModelParams,
    rng: np.random.Generator,
    size: int = 1,
) -> Tuple[np.ndarray, np.ndarray]:
    """Exact draws from ``𝟙_{D∖B}·λe^{−λy}`` normalized; shapes ``(size, d−1)`` and ``(size,)``."""

    xs, ys, _ = draw_nu(ball_x, ball_y, lam, params, rng, size)
    return xs, ys


__all__ = ["draw_nu", "sample_nu", "sample_velocities"]
