"""Experiments that drive the simulator: two-start mixing and the ball kinetic-energy scan."""
from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from dynamics.reflection import ReflectionMode
from dynamics.simulator import simulate
from physics.geometry import ModelParams
from sampling.state import SystemState, initial_state

from .ks import histogram_distance
from .summary import ball_bin_edges

logger = logging.getLogger(__name__)


def two_start_mixing(
    params: ModelParams,
    first: SystemState,
    second: SystemState,
    duration: float,
    *,
    mode: ReflectionMode = ReflectionMode.LAMBERTIAN,
    seeds: Tuple[int, int] = (0, 0),
    ball_edges: Optional[np.ndarray] = None,
    observation_interval: Optional[float] = None,
) -> float:
    """KS distance between the ball-height occupation measures of two runs over their second halves.

    Occupation is binned on *ball_edges*, by default :func:`ball_bin_edges` over
    every height the ball can reach.
    """

    edges = ball_edges if ball_edges is not None else ball_bin_edges(params)
    summaries = []
    for state, seed in zip((first, second), seeds):
        summaries.append(
            simulate(
                state.copy(),
                duration,
                mode,
                np.random.default_rng(seed),
                params=params,
                observation_interval=observation_interval,
                window_start=0.5 * duration,
                ball_edges=edges,
            )
        )
    distance = histogram_distance(edges, summaries[0].ball_occupation, summaries[1].ball_occupation)
    logger.info("two-start mixing distance %.4f over duration %r", distance, duration)
    return distance


@dataclass(frozen=True)
class BallKineticRow:
    n_particles: int
    ball_ke: float
    particle_ke: float
    ratio: float
    ball_share: float


def _ball_ke_job(args: Tuple[ModelParams, float, str, int]) -> BallKineticRow:
    params, duration, mode, seed = args
    rng = np.random.default_rng(seed)
    start = initial_state(params, rng)
    summary = simulate(start, duration, ReflectionMode(mode), rng, params=params, window_start=0.5 * duration)
    ball_ke, _ = summary.ball_ke
    particle_ke, _ = summary.particle_ke_literal
    return BallKineticRow(
        n_particles=params.n,
        ball_ke=ball_ke,
        particle_ke=particle_ke,
        ratio=ball_ke / particle_ke,
        ball_share=ball_ke / params.E,
    )


def ball_ke_scan(
    params: ModelParams,
    particle_counts: Sequence[int],
    duration: float,
    *,
    mode: ReflectionMode = ReflectionMode.LAMBERTIAN,
    seed: int = 0,
    workers: int = 1,
) -> List[BallKineticRow]:
    """Ball versus particle kinetic energy for each particle count, ordered as *particle_counts*."""

    jobs = [(params.with_particles(int(n)), duration, ReflectionMode.parse(mode).value, seed + k) for k, n in enumerate(particle_counts)]
    if workers <= 1 or len(jobs) <= 1:
        return [_ball_ke_job(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_ball_ke_job, jobs))


__all__ = ["BallKineticRow", "ball_ke_scan", "two_start_mixing"]
