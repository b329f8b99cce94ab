"""Excluded-volume exponential integrals and the quantities derived from them.

``ℋₙ(γ, y)`` is the n-th height moment of the measure ``γ·e^{−γ·h}`` over the
container minus a ball centred at height ``y``::

    ℋₙ(γ, y) = |D_b|·n!/γⁿ − ∫_{y−R}^{y+R} slice(h)·γ·hⁿ·e^{−γh} dh

where ``slice(h)`` is the horizontal section of the ball. The excluded term is
evaluated with Gauss-Legendre quadrature after the substitution
``h = y + R·sin φ``, which turns the ``(R² − s²)^{(d−1)/2}`` endpoint factor
into a smooth ``R^d·cos^d φ``.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Optional, Tuple

import numpy as np
from scipy import optimize
from scipy.special import gammaln, roots_legendre

from errors import DegenerateVarianceError, InvalidParameterError, NoConvergenceError

from .geometry import ModelParams, admissible_mask, unit_ball_volume

logger = logging.getLogger(__name__)

INITIAL_NODES = 64
MAX_NODES = 1 << 15
QUADRATURE_RTOL = 1e-13
LAMBDA_RTOL = 1e-12

# Bound constants of the excluded-volume moment estimates.
Q_RATIO_MIN = (1.0 - math.exp(-0.5)) / 8.0
LAMBDA_U_MIN = 1.0 / 200.0
LAMBDA_U_MAX = 21.0
LAMBDA2_VAR_MIN = 2.0 ** -12 * math.exp(-1.0)
LAMBDA2_VAR_MAX = 16.0 / (1.0 - math.exp(-0.5))
U2_OVER_VAR_MIN = 2.0 ** -21
U2_OVER_VAR_MAX = 2.0 ** 23


@lru_cache(maxsize=16)
def _legendre_rule(n_nodes: int) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on ``φ ∈ [−π/2, π/2]``."""

    points, weights = roots_legendre(n_nodes)
    half = 0.5 * math.pi
    return half * points, half * weights


def _check_arguments(gamma: float, y: float, params: ModelParams) -> None:
    if not gamma > 0.0 or not math.isfinite(gamma):
        raise InvalidParameterError(f"rate must be positive and finite, got {gamma!r}")
    if params.R > 0.0 and y < params.R * (1.0 - 1e-12):
        raise InvalidParameterError(f"ball height {y!r} lies below its radius {params.R!r}")


def _leading_terms(max_order: int, gamma: float, params: ModelParams) -> np.ndarray:
    orders = np.arange(max_order + 1)
    log_lead = gammaln(orders + 1.0) - orders * math.log(gamma)
    return params.base_area * np.exp(log_lead)


def _excluded_moments(max_order: int, gamma: float, y: float, params: ModelParams, n_nodes: int) -> np.ndarray:
    phi, weights = _legendre_rule(n_nodes)
    radius = params.R
    heights = y + radius * np.sin(phi)
    base = gamma * np.exp(-gamma * heights) * radius ** params.d * np.cos(phi) ** params.d * weights
    powers = heights[np.newaxis, :] ** np.arange(max_order + 1)[:, np.newaxis]
    return unit_ball_volume(params.d - 1) * (powers @ base)


@lru_cache(maxsize=8192)
def _h_values(max_order: int, gamma: float, y: float, params: ModelParams) -> Tuple[float, ...]:
    lead = _leading_terms(max_order, gamma, params)
    if params.R == 0.0:
        return tuple(float(v) for v in lead)

    n_nodes = INITIAL_NODES
    previous = _excluded_moments(max_order, gamma, y, params, n_nodes)
    while n_nodes < MAX_NODES:
        n_nodes *= 2
        current = _excluded_moments(max_order, gamma, y, params, n_nodes)
        values = lead - current
        scale = np.maximum(np.abs(values), np.finfo(float).tiny)
        if np.all(np.abs(current - previous) <= QUADRATURE_RTOL * scale):
            if n_nodes > 2 * INITIAL_NODES:
                logger.debug("quadrature refined to %d nodes (gamma=%g, y=%g)", n_nodes, gamma, y)
            return tuple(float(v) for v in values)
        previous = current
    raise NoConvergenceError(
        f"excluded-volume quadrature did not converge with {MAX_NODES} nodes (gamma={gamma}, y={y})"
    )


def h_n(order: int, gamma: float, y: float, params: ModelParams) -> float:
    """``ℋ_order(γ, y)`` to relative accuracy ~1e−12."""

    if order < 0:
        raise InvalidParameterError("moment order must be non-negative")
    _check_arguments(gamma, y, params)
    return _h_values(max(int(order), 2), float(gamma), float(y), params)[order]


def h_n_partial_gamma(order: int, gamma: float, y: float, params: ModelParams) -> float:
    """∂ℋₙ/∂γ = ℋₙ/γ − ℋₙ₊₁."""

    _check_arguments(gamma, y, params)
    values = _h_values(max(order + 1, 2), float(gamma), float(y), params)
    return values[order] / gamma - values[order + 1]


def h_n_partial_y(order: int, gamma: float, y: float, params: ModelParams) -> float:
    """∂ℋₙ/∂y = γ(|D_b|n!/γⁿ − ℋₙ) − n(|D_b|(n−1)!/γⁿ⁻¹ − ℋₙ₋₁)."""

    _check_arguments(gamma, y, params)
    values = _h_values(max(order, 2), float(gamma), float(y), params)
    lead = _leading_terms(max(order, 2), gamma, params)
    partial = gamma * (lead[order] - values[order])
    if order > 0:
        partial -= order * (lead[order - 1] - values[order - 1])
    return float(partial)


@dataclass(frozen=True)
class GasLawPoint:
    """Analytic gas state at rate ``lam`` with the ball centred at height ``y``."""

    lam: float
    y: float
    q: float
    u: float
    w: float
    sigma2: float
    base_area: float

    @property
    def log_partition(self) -> float:
        """``log(q·e^{λu}/λ)``."""

        return math.log(self.q) + self.lam * self.u - math.log(self.lam)

    def bound_certificates(self) -> Dict[str, bool]:
        q_ratio = self.q / self.base_area
        lam_u = self.lam * self.u
        lam2_var = self.lam * self.lam * self.sigma2
        u2_over_var = self.u * self.u / self.sigma2
        return {
            "q_ratio": Q_RATIO_MIN <= q_ratio <= 1.0,
            "lambda_u": LAMBDA_U_MIN <= lam_u <= LAMBDA_U_MAX,
            "lambda2_sigma2": LAMBDA2_VAR_MIN <= lam2_var <= LAMBDA2_VAR_MAX,
            "u2_over_sigma2": U2_OVER_VAR_MIN < u2_over_var < U2_OVER_VAR_MAX,
            "sigma2_positive": self.sigma2 > 0.0,
        }

    @property
    def satisfies_bounds(self) -> bool:
        return all(self.bound_certificates().values())


def gas_law_point(gamma: float, y: float, params: ModelParams) -> GasLawPoint:
    _check_arguments(gamma, y, params)
    h0, h1, h2 = _h_values(2, float(gamma), float(y), params)[:3]
    q = h0
    u = h1 / h0
    w = h2
    sigma2 = w / q - u * u
    if not sigma2 > 0.0:
        raise DegenerateVarianceError(f"height variance vanished at gamma={gamma}, y={y}")
    return GasLawPoint(lam=float(gamma), y=float(y), q=q, u=u, w=w, sigma2=sigma2, base_area=params.base_area)


def _mean_height(lam: float, y: float, params: ModelParams) -> float:
    h0, h1 = _h_values(2, lam, y, params)[:2]
    return h1 / h0


def lambda_of_u(u: float, y: float, params: ModelParams) -> float:
    """The unique rate whose mean gas height equals *u* at ball height *y*.

    The mean height is strictly decreasing in the rate and ``λu`` is confined to
    ``[1/200, 21]``, so ``[1/(200u), 21/u]`` always brackets the root. A coarse
    bisection is polished with Newton steps using ``∂u/∂λ = −σ²``.
    """

    if not u > 0.0 or not math.isfinite(u):
        raise InvalidParameterError(f"mean height must be positive, got {u!r}")
    _check_arguments(1.0, y, params)
    if params.R == 0.0:
        return 1.0 / u

    y = float(y)
    lo, hi = LAMBDA_U_MIN / u, LAMBDA_U_MAX / u

    def residual(lam: float) -> float:
        return _mean_height(lam, y, params) - u

    f_lo, f_hi = residual(lo), residual(hi)
    if f_lo < 0.0 or f_hi > 0.0:
        raise NoConvergenceError(f"mean height {u} is not bracketed on [{lo}, {hi}] at y={y}")

    lam = optimize.bisect(residual, lo, hi, xtol=1e-3 * (hi - lo))
    left, right = lo, hi
    for _ in range(60):
        point = gas_law_point(lam, y, params)
        f = point.u - u
        if f == 0.0:
            return lam
        if f > 0.0:
            left = lam
        else:
            right = lam
        candidate = lam + f / point.sigma2
        if not left < candidate < right:
            candidate = 0.5 * (left + right)
        if abs(candidate - lam) <= 0.1 * LAMBDA_RTOL * lam:
            return candidate
        lam = candidate

    logger.debug("Newton polish stalled for u=%g, y=%g; falling back to Brent", u, y)
    try:
        return float(optimize.brentq(residual, lo, hi, xtol=1e-300, rtol=1e-14, maxiter=500))
    except (RuntimeError, ValueError) as exc:
        raise NoConvergenceError(f"lambda_of_u failed for u={u}, y={y}: {exc}") from exc


@dataclass(frozen=True)
class AnalyticPartials:
    dlam_du: float
    dlam_dy: float
    dq_du: float
    dq_dy: float


def analytic_partials(u: float, y: float, params: ModelParams) -> AnalyticPartials:
    """Partials of ``λ(u, y)`` and ``q(λ(u, y), y)`` in closed form."""

    lam = lambda_of_u(u, y, params)
    point = gas_law_point(lam, y, params)
    q, w, area = point.q, point.w, params.base_area
    denom = q * u * u - w
    if abs(denom) < 1e-14 * q * u * u:
        raise DegenerateVarianceError(f"q·u² − w vanished at u={u}, y={y}")
    dlam_du = q / denom
    dlam_dy = (lam * u * area - q) / denom
    factor = (q / lam) * (1.0 - lam * u)
    return AnalyticPartials(
        dlam_du=dlam_du,
        dlam_dy=dlam_dy,
        dq_du=factor * dlam_du,
        dq_dy=factor * dlam_dy + lam * (area - q),
    )


def _log_partition_of_u(u: float, y: float, params: ModelParams) -> float:
    lam = lambda_of_u(u, y, params)
    return gas_law_point(lam, y, params).log_partition


def pel_identity_check(u: float, y: float, params: ModelParams, *, step: float = 1e-6) -> float:
    """Relative residual of ``d/du (q·e^{λu}/λ) = q·e^{λu}`` by central differences."""

    lam = lambda_of_u(u, y, params)
    point = gas_law_point(lam, y, params)
    log_target = math.log(point.q) + lam * u
    h = step * u
    upper = math.exp(_log_partition_of_u(u + h, y, params) - log_target)
    lower = math.exp(_log_partition_of_u(u - h, y, params) - log_target)
    return abs((upper - lower) / (2.0 * h) - 1.0)


@dataclass(frozen=True)
class LogValue:
    """A positive quantity carried as its logarithm."""

    log_value: float
    sign: int = 1

    @property
    def value(self) -> float:
        return self.sign * math.exp(self.log_value)


def phase_volume_estimate(n_particles: int, y: float, u: float, params: ModelParams) -> LogValue:
    """Leading-order volume of heights/positions with mean height *u*.

    ``(q·e^{λu}/λ)ⁿ · n^{1−n} · σ^{−1} · (2π)^{−1/2}`` with ``λ = λ(u, y)``.
    """

    if n_particles < 2:
        raise InvalidParameterError("phase volume needs at least two particles")
    lam = lambda_of_u(u, y, params)
    point = gas_law_point(lam, y, params)
    n = n_particles
    log_value = (
        n * point.log_partition
        + (1 - n) * math.log(n)
        - 0.5 * math.log(point.sigma2)
        - 0.5 * math.log(2.0 * math.pi)
    )
    return LogValue(log_value=log_value)


def exact_slab_volume(n_particles: int, u: float, params: ModelParams) -> LogValue:
    """Exact slab volume without a ball: ``|D_b|ⁿ·uⁿ⁻¹·√n/(n−1)!``."""

    if n_particles < 2:
        raise InvalidParameterError("slab volume needs at least two particles")
    if not u > 0.0:
        raise InvalidParameterError("mean height must be positive")
    n = n_particles
    log_value = n * math.log(params.base_area) + (n - 1) * math.log(u) + 0.5 * math.log(n) - gammaln(n)
    return LogValue(log_value=float(log_value))


def slab_volume_monte_carlo(
    n_particles: int,
    y: float,
    u: float,
    params: ModelParams,
    rng: np.random.Generator,
    *,
    samples: int = 200_000,
    ball_x: Optional[np.ndarray] = None,
    batch: int = 20_000,
) -> Tuple[float, float]:
    """Hit-or-miss slab volume with the ball fixed at ``(ball_x, y)``.

    Horizontal positions are uniform on the base and heights uniform on the
    simplex ``Σ yᵢ = n·u``; the admissible fraction scales the ball-free volume.
    Returns ``(volume, standard_error)``.
    """

    n = n_particles
    ball_x = np.zeros(params.d - 1) if ball_x is None else np.asarray(ball_x, dtype=float)
    exact = exact_slab_volume(n, u, params).value
    hits = 0
    drawn = 0
    while drawn < samples:
        size = min(batch, samples - drawn)
        heights = rng.dirichlet(np.ones(n), size=size) * (n * u)
        xs = sample_base_points(rng, (size, n), params.d, params.rho_b)
        ok = admissible_mask(
            xs.reshape(size * n, params.d - 1),
            heights.reshape(size * n),
            ball_x,
            y,
            params,
        ).reshape(size, n)
        hits += int(np.count_nonzero(ok.all(axis=1)))
        drawn += size
    fraction = hits / drawn
    stderr = math.sqrt(max(fraction * (1.0 - fraction), 0.0) / drawn)
    return exact * fraction, exact * stderr


def sample_base_points(rng: np.random.Generator, shape: Tuple[int, ...], d: int, radius: float) -> np.ndarray:
    """Uniform points on the (d−1)-ball of *radius*; output shape ``shape + (d−1,)``."""

    k = d - 1
    if k == 1:
        return rng.uniform(-radius, radius, size=shape + (1,))
    directions = rng.standard_normal(size=shape + (k,))
    directions /= np.linalg.norm(directions, axis=-1, keepdims=True)
    radii = radius * rng.random(size=shape + (1,)) ** (1.0 / k)
    return directions * radii


def log_slab_volume_all_centers(n_particles: int, y: float, u: float, params: ModelParams) -> float:
    """``log(|D_b'|·|D_b|·n^{1−n}·(q·e^{λu}/λ)^{n−1})``: volume with the ball centre free."""

    if n_particles < 2:
        raise InvalidParameterError("phase volume needs at least two particles")
    lam = lambda_of_u(u, y, params)
    point = gas_law_point(lam, y, params)
    n = n_particles
    return (
        math.log(params.base.admissible_area)
        + math.log(params.base_area)
        + (1 - n) * math.log(n)
        + (n - 1) * point.log_partition
    )


__all__ = [
    "AnalyticPartials",
    "GasLawPoint",
    "LogValue",
    "analytic_partials",
    "exact_slab_volume",
    "gas_law_point",
    "h_n",
    "h_n_partial_gamma",
    "h_n_partial_y",
    "lambda_of_u",
    "log_slab_volume_all_centers",
    "pel_identity_check",
    "phase_volume_estimate",
    "sample_base_points",
    "slab_volume_monte_carlo",
]
