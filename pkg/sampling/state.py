"""Phase points of the n-particle-plus-ball system and their constructors."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from errors import EnergyExhaustedError, InfeasibleConstraintError, InvalidParameterError
from physics.geometry import ModelParams, admissible_mask

from .exact import sample_velocities


@dataclass
class SystemState:
    """Positions and velocities of the n particles (rows ``0..n−1``) and the ball (row ``n``).

    Each position row is ``(x_1, …, x_{d−1}, y)``.
    """

    positions: np.ndarray
    velocities: np.ndarray
    time: float = 0.0

    @property
    def n_particles(self) -> int:
        return self.positions.shape[0] - 1

    @property
    def d(self) -> int:
        return self.positions.shape[1]

    @property
    def xs(self) -> np.ndarray:
        return self.positions[:-1, :-1]

    @property
    def ys(self) -> np.ndarray:
        return self.positions[:-1, -1]

    @property
    def ball_x(self) -> np.ndarray:
        return self.positions[-1, :-1]

    @property
    def ball_y(self) -> float:
        return float(self.positions[-1, -1])

    @property
    def ball_velocity(self) -> np.ndarray:
        return self.velocities[-1]

    def copy(self) -> "SystemState":
        return SystemState(self.positions.copy(), self.velocities.copy(), self.time)


def object_masses(params: ModelParams) -> np.ndarray:
    masses = np.full(params.n + 1, params.particle_mass)
    masses[-1] = params.M
    return masses


def potential_energy(positions: np.ndarray, params: ModelParams) -> float:
    heights = positions[:, -1]
    return float(params.g * (params.particle_mass * np.sum(heights[:-1]) + params.M * heights[-1]))


def kinetic_energy(velocities: np.ndarray, params: ModelParams) -> float:
    speeds_sq = np.einsum("ij,ij->i", velocities, velocities)
    return float(0.5 * (params.particle_mass * np.sum(speeds_sq[:-1]) + params.M * speeds_sq[-1]))


def total_energy(state: SystemState, params: ModelParams) -> float:
    return potential_energy(state.positions, params) + kinetic_energy(state.velocities, params)


def state_violations(
    state: SystemState,
    params: ModelParams,
    *,
    energy_rtol: float = 1e-12,
    tolerance: float = 1e-10,
) -> List[str]:
    """Human-readable list of broken state invariants (empty when valid)."""

    problems: List[str] = []
    if state.positions.shape != (params.n + 1, params.d) or state.velocities.shape != (params.n + 1, params.d):
        return [f"state arrays must have shape {(params.n + 1, params.d)}"]
    ok = admissible_mask(state.xs, state.ys, state.ball_x, state.ball_y, params, slack=tolerance)
    if not np.all(ok):
        problems.append(f"{int(np.count_nonzero(~ok))} particle(s) outside the admissible region")
    if float(np.linalg.norm(state.ball_x)) > params.base.admissible_radius + tolerance:
        problems.append("ball centre outside the admissible base region")
    if state.ball_y < params.R - tolerance:
        problems.append("ball below the floor")
    energy = total_energy(state, params)
    if abs(energy - params.E) > energy_rtol * params.E:
        problems.append(f"energy {energy!r} differs from E={params.E!r}")
    return problems


def _base_lattice(n: int, d: int, radius: float) -> np.ndarray:
    """n distinct horizontal points inside the (d−1)-ball of *radius*."""

    if d == 2:
        return np.linspace(-radius, radius, n + 2)[1:-1].reshape(n, 1)
    if d == 3:
        # sunflower lattice: evenly spread, no two points coincide
        index = np.arange(n) + 0.5
        r = radius * np.sqrt(index / n)
        theta = index * math.pi * (3.0 - math.sqrt(5.0))
        return np.column_stack([r * np.cos(theta), r * np.sin(theta)])
    points = np.zeros((n, d - 1))
    points[:, 0] = np.linspace(-radius, radius, n + 2)[1:-1]
    return points


def initial_state(
    params: ModelParams,
    rng: Optional[np.random.Generator] = None,
    *,
    ball_height: Optional[float] = None,
) -> SystemState:
    """Collision-free start: particles on a low horizontal lattice under the ball.

    The ball sits at *ball_height* when it lies strictly inside ``(R, E/(Mg))``,
    otherwise a quarter of the spare energy above the floor. Velocities are drawn
    on the energy sphere from *rng* (seed 0 when omitted).
    """

    slack = params.E - params.M * params.g * params.R
    if ball_height is not None and params.R < ball_height < params.ceiling:
        y_ball = float(ball_height)
    elif params.M > 0.0:
        y_ball = params.R + slack / (4.0 * params.M * params.g)
    else:
        y_ball = params.R + params.rho_b

    gas_budget = (params.E - params.M * params.g * y_ball) / (4.0 * params.m * params.g)
    height = min(0.5 * (y_ball - params.R), gas_budget) if params.R > 0.0 else gas_budget
    positions = np.zeros((params.n + 1, params.d))
    positions[:-1, :-1] = _base_lattice(params.n, params.d, 0.9 * params.rho_b)
    positions[:-1, -1] = height
    positions[-1, -1] = y_ball

    pe = potential_energy(positions, params)
    if pe >= params.E:
        raise EnergyExhaustedError("initial configuration leaves no kinetic energy")
    if rng is None:
        rng = np.random.default_rng(0)
    velocities = sample_velocities(pe, params, rng)
    return SystemState(positions=positions, velocities=velocities)


def _vertical_speeds(budget: float, masses: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    shares = rng.dirichlet(np.ones(len(masses))) * budget
    signs = np.where(rng.random(len(masses)) < 0.5, -1.0, 1.0)
    return signs * np.sqrt(2.0 * shares / masses)


def degenerate_vertical_state(params: ModelParams, rng: np.random.Generator) -> SystemState:
    """Particles on distinct vertical lines outside the ball's shadow, all motion vertical.

    Under specular reflection no particle ever meets the ball or picks up
    horizontal velocity.
    """

    if params.M <= 0.0:
        raise InvalidParameterError("degenerate orbits need a ball with positive mass")
    n, d = params.n, params.d
    inner = params.R + 0.05 * (params.rho_b - params.R)
    outer = params.R + 0.95 * (params.rho_b - params.R)
    radii = inner + (outer - inner) * (np.arange(n) + 0.5) / n
    positions = np.zeros((n + 1, d))
    if d == 2:
        sides = np.where(np.arange(n) % 2 == 0, 1.0, -1.0)
        positions[:-1, 0] = sides * radii
    else:
        theta = np.arange(n) * math.pi * (3.0 - math.sqrt(5.0))
        positions[:-1, 0] = radii * np.cos(theta)
        positions[:-1, 1] = radii * np.sin(theta)
    state = initial_state(params)
    positions[:-1, -1] = state.ys
    positions[-1, -1] = state.ball_y

    budget = params.E - potential_energy(positions, params)
    masses = np.append(np.full(n, params.particle_mass), params.M)
    velocities = np.zeros((n + 1, d))
    velocities[:, -1] = _vertical_speeds(budget, masses, rng)
    return SystemState(positions=positions, velocities=velocities)


def aligned_vertical_state(params: ModelParams, rng: np.random.Generator) -> SystemState:
    """All particles stacked on the ball's vertical axis above it, all motion vertical."""

    if params.M <= 0.0:
        raise InvalidParameterError("aligned orbits need a ball with positive mass")
    n, d = params.n, params.d
    available = params.E - params.M * params.g * params.R
    mg = params.m * params.g
    y_ball = params.R + 0.05 * available / (params.M * params.g + mg)
    spread = 0.05 * available / mg
    heights = y_ball + params.R + spread * (np.arange(n) + 1.0) / n
    positions = np.zeros((n + 1, d))
    positions[:-1, -1] = heights
    positions[-1, -1] = y_ball
    budget = params.E - potential_energy(positions, params)
    if budget <= 0.0:
        raise InfeasibleConstraintError("no energy left for an aligned vertical configuration")
    masses = np.append(np.full(n, params.particle_mass), params.M)
    velocities = np.zeros((n + 1, d))
    velocities[:, -1] = _vertical_speeds(budget, masses, rng)
    return SystemState(positions=positions, velocities=velocities)


__all__ = [
    "SystemState",
    "aligned_vertical_state",
    "degenerate_vertical_state",
    "initial_state",
    "kinetic_energy",
    "object_masses",
    "potential_energy",
    "state_violations",
    "total_energy",
]
