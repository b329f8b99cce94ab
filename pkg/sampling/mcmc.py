"""Random-walk Metropolis chains for the microcanonical ensemble and the mean-height slab.

Both chains use block moves with a Gaussian proposal per block and adapt
each block's scale during burn-in only, so the emitted chain is a plain
Metropolis chain with a fixed symmetric proposal.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Iterator, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from errors import InfeasibleConstraintError, InvalidParameterError
from physics.gas_analytics import lambda_of_u
from physics.geometry import ModelParams, admissible_mask

from .exact import sample_nu, sample_velocities
from .state import SystemState, initial_state, potential_energy

logger = logging.getLogger(__name__)

MAX_INITIAL_ATTEMPTS = 1_000_000
_CHUNK = 4096


class McmcConfig(BaseModel):
    """Chain settings; ``thinning = None`` means ``10·n`` steps between samples."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    burn_in: int = Field(100_000, ge=0)
    thinning: Optional[int] = Field(None, ge=1)
    samples: int = Field(1000, ge=1)
    scale: float = Field(0.05, gt=0, description="Initial proposal scale relative to rho_b")
    adaptation_window: int = Field(200, ge=1)
    target_acceptance: float = Field(0.3, gt=0, lt=1)
    seed: int = Field(0, ge=0)

    def thinning_for(self, n_particles: int) -> int:
        return self.thinning if self.thinning is not None else 10 * n_particles


@dataclass
class _Block:
    """Proposal scale of one move type with its acceptance bookkeeping."""

    scale: float
    lower: float
    upper: float
    proposals: int = 0
    accepted: int = 0
    window_proposals: int = 0
    window_accepted: int = 0

    def record(self, accepted: bool) -> None:
        self.proposals += 1
        self.window_proposals += 1
        if accepted:
            self.accepted += 1
            self.window_accepted += 1

    def adapt(self, window: int, target: float) -> None:
        if self.window_proposals < window:
            return
        rate = self.window_accepted / self.window_proposals
        self.scale = min(self.upper, max(self.lower, self.scale * math.exp(2.0 * (rate - target))))
        self.window_proposals = 0
        self.window_accepted = 0

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.proposals if self.proposals else math.nan


@dataclass
class ChainDiagnostics:
    steps: int = 0
    proposals: Dict[str, int] = field(default_factory=dict)
    acceptance: Dict[str, float] = field(default_factory=dict)
    scales: Dict[str, float] = field(default_factory=dict)
    effective_sample_size: float = math.nan

    def to_dict(self) -> Dict[str, object]:
        return {
            "steps": self.steps,
            "proposals": dict(self.proposals),
            "acceptance": dict(self.acceptance),
            "scales": dict(self.scales),
            "effective_sample_size": self.effective_sample_size,
        }


def effective_sample_size(trace: np.ndarray) -> float:
    """ESS from the initial positive sequence of FFT autocorrelations."""

    x = np.asarray(trace, dtype=float)
    n = len(x)
    if n < 4:
        return float(n)
    x = x - x.mean()
    variance = float(np.dot(x, x)) / n
    if variance == 0.0:
        return float(n)
    size = 1 << (2 * n - 1).bit_length()
    spectrum = np.fft.rfft(x, size)
    acf = np.fft.irfft(spectrum * np.conj(spectrum), size)[:n] / (n * variance)
    tau = 1.0
    for k in range(1, n - 1, 2):
        pair = acf[k] + acf[k + 1]
        if pair <= 0.0:
            break
        tau += 2.0 * pair
    return float(n / tau)


def _diagnostics(steps: int, blocks: Dict[str, _Block], trace: Optional[np.ndarray]) -> ChainDiagnostics:
    return ChainDiagnostics(
        steps=steps,
        proposals={name: block.proposals for name, block in blocks.items()},
        acceptance={name: block.acceptance_rate for name, block in blocks.items()},
        scales={name: block.scale for name, block in blocks.items()},
        effective_sample_size=effective_sample_size(trace) if trace is not None and len(trace) else math.nan,
    )


@dataclass
class MicrocanonicalRun:
    positions: np.ndarray
    velocities: np.ndarray
    diagnostics: ChainDiagnostics

    def __len__(self) -> int:
        return len(self.positions)

    def states(self) -> Iterator[SystemState]:
        for pos, vel in zip(self.positions, self.velocities):
            yield SystemState(positions=pos, velocities=vel)

    @property
    def ball_heights(self) -> np.ndarray:
        return self.positions[:, -1, -1]

    @property
    def ball_horizontal(self) -> np.ndarray:
        return self.positions[:, -1, :-1]


class MicrocanonicalSampler:
    """Metropolis chain on admissible positions with density ``(E − PE)^{((n+1)d−2)/2}``.

    One step picks one of the moving objects uniformly and shifts all of its
    coordinates by a Gaussian of the block's scale.
    """

    def __init__(
        self,
        params: ModelParams,
        cfg: McmcConfig,
        *,
        rng: Optional[np.random.Generator] = None,
        start: Optional[SystemState] = None,
        ball_height: Optional[float] = None,
    ) -> None:
        self.params = params
        self.cfg = cfg
        self.rng = rng if rng is not None else np.random.default_rng(cfg.seed)
        state = start if start is not None else initial_state(params, self.rng, ball_height=ball_height)
        self.positions = state.positions.copy()
        self.kinetic = params.E - potential_energy(self.positions, params)
        if not self.kinetic > 0.0:
            raise InvalidParameterError("starting configuration leaves no kinetic energy")
        self.moving = params.n + 1 if params.M > 0.0 else params.n
        self.exponent = 0.5 * (self.moving * params.d - 2)
        reach = params.rho_b
        self.blocks = {
            "particle": _Block(cfg.scale * reach, 1e-9 * reach, 10.0 * reach),
            "ball": _Block(cfg.scale * reach, 1e-9 * reach, 10.0 * reach),
        }
        self.steps = 0

    def _particle_move(self, k: int, step: np.ndarray, log_u: float) -> bool:
        params = self.params
        proposal = self.positions[k] + self.blocks["particle"].scale * step
        y_new = proposal[-1]
        if y_new < 0.0:
            return False
        x_new = proposal[:-1]
        if float(np.dot(x_new, x_new)) > params.rho_b * params.rho_b:
            return False
        offset = proposal - self.positions[-1]
        if float(np.dot(offset, offset)) < params.R * params.R:
            return False
        kinetic = self.kinetic - params.particle_mass * params.g * (y_new - self.positions[k, -1])
        if kinetic <= 0.0:
            return False
        if self.exponent * (math.log(kinetic) - math.log(self.kinetic)) < log_u:
            return False
        self.positions[k] = proposal
        self.kinetic = kinetic
        return True

    def _ball_move(self, step: np.ndarray, log_u: float) -> bool:
        params = self.params
        proposal = self.positions[-1] + self.blocks["ball"].scale * step
        if proposal[-1] < params.R:
            return False
        limit = params.base.admissible_radius
        if float(np.dot(proposal[:-1], proposal[:-1])) > limit * limit:
            return False
        kinetic = self.kinetic - params.M * params.g * (proposal[-1] - self.positions[-1, -1])
        if kinetic <= 0.0:
            return False
        if self.exponent * (math.log(kinetic) - math.log(self.kinetic)) < log_u:
            return False
        offsets = self.positions[:-1] - proposal
        if np.any(np.einsum("ij,ij->i", offsets, offsets) < params.R * params.R):
            return False
        self.positions[-1] = proposal
        self.kinetic = kinetic
        return True

    def advance(self, steps: int, *, adapt: bool) -> None:
        n, d = self.params.n, self.params.d
        window, target = self.cfg.adaptation_window, self.cfg.target_acceptance
        remaining = steps
        while remaining > 0:
            size = min(_CHUNK, remaining)
            picks = self.rng.integers(self.moving, size=size)
            steps_ = self.rng.standard_normal((size, d))
            log_us = np.log(self.rng.random(size))
            for k, step, log_u in zip(picks, steps_, log_us):
                if k < n:
                    block = self.blocks["particle"]
                    accepted = self._particle_move(int(k), step, float(log_u))
                else:
                    block = self.blocks["ball"]
                    accepted = self._ball_move(step, float(log_u))
                block.record(accepted)
                if adapt:
                    block.adapt(window, target)
            remaining -= size
            self.steps += size
            # resynchronise the running kinetic energy with the positions
            self.kinetic = self.params.E - potential_energy(self.positions, self.params)

    def run(self, n_samples: Optional[int] = None) -> MicrocanonicalRun:
        count = n_samples if n_samples is not None else self.cfg.samples
        thin = self.cfg.thinning_for(self.params.n)
        logger.info("microcanonical chain: burn-in %d, %d samples every %d steps", self.cfg.burn_in, count, thin)
        self.advance(self.cfg.burn_in, adapt=True)
        positions = np.empty((count, self.params.n + 1, self.params.d))
        velocities = np.empty_like(positions)
        for i in range(count):
            self.advance(thin, adapt=False)
            positions[i] = self.positions
            velocities[i] = sample_velocities(potential_energy(self.positions, self.params), self.params, self.rng)
        diagnostics = _diagnostics(self.steps, self.blocks, positions[:, -1, -1])
        logger.info("chain finished: %s", diagnostics.to_dict())
        return MicrocanonicalRun(positions=positions, velocities=velocities, diagnostics=diagnostics)


def sample_microcanonical(
    params: ModelParams,
    cfg: McmcConfig,
    *,
    rng: Optional[np.random.Generator] = None,
    ball_height: Optional[float] = None,
) -> SystemState:
    """One microcanonical state after burn-in and one thinning interval."""

    return next(MicrocanonicalSampler(params, cfg, rng=rng, ball_height=ball_height).run(1).states())


def sample_microcanonical_chain(
    params: ModelParams,
    cfg: McmcConfig,
    n_samples: Optional[int] = None,
    *,
    rng: Optional[np.random.Generator] = None,
    ball_height: Optional[float] = None,
) -> MicrocanonicalRun:
    return MicrocanonicalSampler(params, cfg, rng=rng, ball_height=ball_height).run(n_samples)


@dataclass
class SlabRun:
    xs: np.ndarray
    ys: np.ndarray
    diagnostics: ChainDiagnostics


class ConditionalSlabSampler:
    """Uniform chain on particle configurations with ``Σ yᵢ/n = u`` around a fixed ball.

    Height moves transfer ``δ`` between a random pair so the sum is kept;
    horizontal moves shift a single particle inside the base.
    """

    def __init__(
        self,
        ball_x: np.ndarray,
        ball_y: float,
        u: float,
        n_particles: int,
        params: ModelParams,
        cfg: McmcConfig,
        *,
        rng: Optional[np.random.Generator] = None,
    ) -> None:
        if not u > 0.0:
            raise InvalidParameterError(f"mean height must be positive, got {u!r}")
        if n_particles < 1:
            raise InvalidParameterError("at least one particle is required")
        self.params = params.with_particles(n_particles)
        self.cfg = cfg
        self.rng = rng if rng is not None else np.random.default_rng(cfg.seed)
        self.ball_x = np.asarray(ball_x, dtype=float).reshape(params.d - 1)
        self.ball_y = float(ball_y)
        self.u = float(u)
        self.n = n_particles
        self.lam = lambda_of_u(self.u, self.ball_y, params)
        self.xs, self.ys = self._initial_point()
        reach = params.rho_b
        self.blocks = {
            "height": _Block(cfg.scale * self.u * 10.0, 1e-9 * self.u, 100.0 * self.u),
            "horizontal": _Block(cfg.scale * reach, 1e-9 * reach, 10.0 * reach),
        }
        self.steps = 0

    def _admissible(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        return admissible_mask(xs, ys, self.ball_x, self.ball_y, self.params)

    def _initial_point(self) -> Tuple[np.ndarray, np.ndarray]:
        """Draw from ν, rescale heights onto the slab, redraw any particle the rescale pushed into the ball."""

        n, target = self.n, self.n * self.u
        xs, ys = sample_nu(self.ball_x, self.ball_y, self.lam, self.params, self.rng, size=n)
        attempts = n
        while attempts < MAX_INITIAL_ATTEMPTS:
            scaled = ys * (target / float(np.sum(ys)))
            # put the rounding remainder on the highest particle
            top = int(np.argmax(scaled))
            scaled[top] += target - float(np.sum(scaled))
            bad = ~self._admissible(xs, scaled)
            if not np.any(bad):
                return xs, scaled
            count = int(np.count_nonzero(bad))
            new_x, new_y = sample_nu(self.ball_x, self.ball_y, self.lam, self.params, self.rng, size=count)
            xs[bad] = new_x
            ys[bad] = new_y
            attempts += count
        raise InfeasibleConstraintError(
            f"no admissible configuration with mean height {self.u} after {MAX_INITIAL_ATTEMPTS} attempts"
        )

    def _height_move(self, i: int, j: int, delta: float) -> bool:
        pair_sum = self.ys[i] + self.ys[j]
        yi = self.ys[i] + delta
        yj = pair_sum - yi
        if yi < 0.0 or yj < 0.0:
            return False
        pair_x = self.xs[[i, j]]
        if not np.all(self._admissible(pair_x, np.array([yi, yj]))):
            return False
        self.ys[i] = yi
        self.ys[j] = yj
        return True

    def _horizontal_move(self, i: int, step: np.ndarray) -> bool:
        x_new = self.xs[i] + self.blocks["horizontal"].scale * step
        if float(np.dot(x_new, x_new)) > self.params.rho_b ** 2:
            return False
        offset = np.append(x_new - self.ball_x, self.ys[i] - self.ball_y)
        if float(np.dot(offset, offset)) < self.params.R ** 2:
            return False
        self.xs[i] = x_new
        return True

    def advance(self, steps: int, *, adapt: bool) -> None:
        n, k = self.n, self.params.d - 1
        window, target = self.cfg.adaptation_window, self.cfg.target_acceptance
        remaining = steps
        while remaining > 0:
            size = min(_CHUNK, remaining)
            kinds = self.rng.random(size) < (0.5 if n > 1 else 0.0)
            first = self.rng.integers(n, size=size)
            second = self.rng.integers(max(n - 1, 1), size=size)
            normals = self.rng.standard_normal((size, k + 1))
            for is_height, i, j, z in zip(kinds, first, second, normals):
                i = int(i)
                if is_height:
                    j = int(j) + (1 if j >= i else 0)
                    block = self.blocks["height"]
                    accepted = self._height_move(i, j, block.scale * float(z[0]))
                else:
                    block = self.blocks["horizontal"]
                    accepted = self._horizontal_move(i, z[1:])
                block.record(accepted)
                if adapt:
                    block.adapt(window, target)
            remaining -= size
            self.steps += size

    def run(self, n_samples: Optional[int] = None) -> SlabRun:
        count = n_samples if n_samples is not None else self.cfg.samples
        thin = self.cfg.thinning_for(self.n)
        self.advance(self.cfg.burn_in, adapt=True)
        xs = np.empty((count, self.n, self.params.d - 1))
        ys = np.empty((count, self.n))
        for s in range(count):
            self.advance(thin, adapt=False)
            xs[s] = self.xs
            ys[s] = self.ys
        diagnostics = _diagnostics(self.steps, self.blocks, ys[:, 0])
        return SlabRun(xs=xs, ys=ys, diagnostics=diagnostics)


def sample_conditional_slab(
    ball_x: np.ndarray,
    ball_y: float,
    u: float,
    n_particles: int,
    params: ModelParams,
    cfg: McmcConfig,
    *,
    rng: Optional[np.random.Generator] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """Particle positions ``(xs, ys)`` from the slab chain after burn-in."""

    sampler = ConditionalSlabSampler(ball_x, ball_y, u, n_particles, params, cfg, rng=rng)
    sampler.advance(cfg.burn_in, adapt=True)
    return sampler.xs.copy(), sampler.ys.copy()


__all__ = [
    "ChainDiagnostics",
    "ConditionalSlabSampler",
    "McmcConfig",
    "MicrocanonicalRun",
    "MicrocanonicalSampler",
    "SlabRun",
    "effective_sample_size",
    "sample_conditional_slab",
    "sample_microcanonical",
    "sample_microcanonical_chain",
]
