"""Archimedes equilibrium, the ψ profile and the finite-n ball-height density.

The equilibrium ``(y_A, λ_A)`` solves::

    K(λ, y) := m(|D_b| − q)/q = M            (buoyancy balances weight)
    G(λ, y) := dmg/(2λ) + mg·u + Mgy = E     (energy partition)

``G`` is strictly decreasing in ``λ`` so ``λ_y`` (the root of ``G = E`` at a
fixed height) is unique, and ``y_A`` is the root of ``F(y) = K(λ_y, y) − M``.
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate, optimize

from errors import GridTooCoarseError, InvalidParameterError, NotFloatingError, OutOfRangeError

from .gas_analytics import gas_law_point, lambda_of_u
from .geometry import ModelParams

logger = logging.getLogger(__name__)

DEFAULT_GRID_POINTS = 4096
NORMALIZATION_RTOL = 1e-6
GRID_PEAK_FRACTION = 1e-4
LAMBDA_RTOL = 1e-14
HEIGHT_XTOL = 1e-12


@dataclass(frozen=True)
class EquilibriumSolution:
    y_A: float
    lambda_A: float
    u_A: float
    lambda_star: float
    residual_K: float
    residual_G: float
    floating: bool

    def as_row(self) -> Dict[str, float]:
        row = asdict(self)
        row["floating"] = int(self.floating)
        return row


def z_of_y(y: float, params: ModelParams) -> float:
    """``(E − Mgy)/(mg)``: the energy left to the gas, in gas-height units."""

    if params.M > 0.0 and y >= params.ceiling:
        raise OutOfRangeError(f"height {y} is not below E/(Mg) = {params.ceiling}")
    return (params.E - params.M * params.g * y) / (params.m * params.g)


def buoyancy_K(lam: float, y: float, params: ModelParams) -> float:
    q = gas_law_point(lam, y, params).q
    return params.m * (params.base_area - q) / q


def energy_G(lam: float, y: float, params: ModelParams) -> float:
    u = gas_law_point(lam, y, params).u
    mg = params.m * params.g
    return params.d * mg / (2.0 * lam) + mg * u + params.M * params.g * y


def solve_lambda_given_y(y: float, params: ModelParams) -> float:
    """The unique ``λ_y`` with ``G(λ_y, y) = E``."""

    available = params.E - params.M * params.g * y
    if not available > 0.0:
        raise OutOfRangeError(f"height {y} leaves no energy to the gas (E − Mgy = {available})")
    if params.R > 0.0 and y < params.R * (1.0 - 1e-12):
        raise OutOfRangeError(f"ball height {y} lies below its radius {params.R}")

    mg = params.m * params.g
    # G > E at lo since dmg/(2λ) alone equals the available energy; G < E at hi by λu ≤ 21.
    lo = params.d * mg / (2.0 * available)
    hi = 2.0 * (0.5 * params.d + 21.0) * mg / available

    def residual(lam: float) -> float:
        return energy_G(lam, y, params) - params.E

    lam, info = optimize.brentq(residual, lo, hi, xtol=1e-15 * lo, rtol=LAMBDA_RTOL, full_output=True)
    logger.debug("lambda_y at y=%g: %.15g (%d iterations)", y, lam, info.iterations)
    return float(lam)


def lambda_star(params: ModelParams) -> float:
    return solve_lambda_given_y(params.R, params)


def floating_condition(params: ModelParams) -> bool:
    """``M < K(λ_*, R)``: the resting ball displaces more gas weight than it weighs."""

    return params.M < buoyancy_K(lambda_star(params), params.R, params)


def _height_residual(y: float, params: ModelParams) -> float:
    lam = solve_lambda_given_y(y, params)
    return buoyancy_K(lam, y, params) - params.M


def _solution_at(y: float, lam: float, lam_star: float, params: ModelParams, floating: bool) -> EquilibriumSolution:
    point = gas_law_point(lam, y, params)
    K = params.m * (params.base_area - point.q) / point.q
    G = params.d * params.m * params.g / (2.0 * lam) + params.m * params.g * point.u + params.M * params.g * y
    residual_K = K / params.M - 1.0 if params.M > 0 else math.nan
    return EquilibriumSolution(
        y_A=y,
        lambda_A=lam,
        u_A=point.u,
        lambda_star=lam_star,
        residual_K=residual_K,
        residual_G=G / params.E - 1.0,
        floating=floating,
    )


def resting_solution(params: ModelParams) -> EquilibriumSolution:
    """The labelled non-floating answer: ``y = R`` with ``λ = λ_*``."""

    lam_star = lambda_star(params)
    return _solution_at(params.R, lam_star, lam_star, params, floating=False)


def _upper_height(params: ModelParams) -> float:
    span = params.ceiling - params.R
    for k in range(1, 64):
        y = params.ceiling - span * 2.0 ** -k
        if _height_residual(y, params) < 0.0:
            return y
    raise InvalidParameterError("could not bracket the floating height below E/(Mg)")


def solve_archimedes(params: ModelParams) -> EquilibriumSolution:
    """Solve ``K = M``, ``G = E`` for the floating height and rate."""

    if params.M == 0.0:
        if params.R == 0.0:
            # no ball: the gas-only reduction G = E with u = 1/λ
            lam = lambda_star(params)
            return _solution_at(0.0, lam, lam, params, floating=False)
        raise InvalidParameterError("the floating height needs a ball with positive mass")

    lam_star = lambda_star(params)
    if not params.M < buoyancy_K(lam_star, params.R, params):
        raise NotFloatingError(
            "the ball is heavier than the gas it displaces; it rests at the bottom",
            resting=_solution_at(params.R, lam_star, lam_star, params, floating=False),
        )

    span = params.ceiling - params.R
    upper = _upper_height(params)
    y_A = optimize.bisect(
        _height_residual, params.R, upper, args=(params,), xtol=HEIGHT_XTOL * span, maxiter=200
    )
    # polish the bisection bracket so both residuals reach rounding level
    left = max(params.R, y_A - 4.0 * HEIGHT_XTOL * span)
    right = min(upper, y_A + 4.0 * HEIGHT_XTOL * span)
    if _height_residual(left, params) > 0.0 > _height_residual(right, params):
        y_A = optimize.brentq(_height_residual, left, right, args=(params,), xtol=1e-15 * span, rtol=1e-15)
    lam_A = solve_lambda_given_y(y_A, params)
    solution = _solution_at(float(y_A), lam_A, lam_star, params, floating=True)
    logger.info(
        "archimedes solution y_A=%.12g lambda_A=%.12g residuals K=%.2e G=%.2e",
        solution.y_A,
        solution.lambda_A,
        solution.residual_K,
        solution.residual_G,
    )
    return solution


def predicted_kinetic_energy(lambda_A: float, params: ModelParams) -> float:
    """``dmg/(2λ_A)``: the limiting ``½·m·‖v‖²`` of one particle."""

    return params.d * params.m * params.g / (2.0 * lambda_A)


def solve_or_rest(params: ModelParams) -> EquilibriumSolution:
    """Floating solution when it exists, otherwise the resting solution."""

    try:
        return solve_archimedes(params)
    except NotFloatingError as exc:
        return exc.resting


def u0_of_y(y: float, params: ModelParams) -> float:
    """The mean gas height maximizing ``α_y``; root of ``κ_y``.

    ``κ_y(u) = 0`` is the same equation as ``G(λ(u, y), y) = E``, so
    ``u₀(y) = u(λ_y, y)``.
    """

    z_of_y(y, params)
    lam = solve_lambda_given_y(y, params)
    return gas_law_point(lam, y, params).u


def kappa_y(u: float, y: float, params: ModelParams) -> float:
    return u + params.d / (2.0 * lambda_of_u(u, y, params)) - z_of_y(y, params)


def beta_y(u: float, y: float, params: ModelParams) -> float:
    """``∂/∂u log α_y(u) = λ(u, y) − d/(2(z − u))``, for ``0 < u < z(y)``."""

    z = z_of_y(y, params)
    if not 0.0 < u < z:
        raise OutOfRangeError(f"mean height {u} is outside (0, z(y) = {z})")
    return lambda_of_u(u, y, params) - params.d / (2.0 * (z - u))


@dataclass(frozen=True)
class PsiValue:
    """``log ψ(y)`` by both closed forms along with the point it was built from."""

    y: float
    log_psi: float
    log_psi_alt: float
    lam0: float
    u0: float
    q0: float


def psi_of_y(y: float, params: ModelParams) -> PsiValue:
    """``ψ(y) = q₀e^{λ₀u₀}/λ₀^{d/2+1}`` in log space.

    The second form ``(2/d)^{d/2}(z − u₀)^{d/2}q₀e^{λ₀u₀}/λ₀`` is kept alongside
    as a consistency check.
    """

    z = z_of_y(y, params)
    lam0 = solve_lambda_given_y(y, params)
    point = gas_law_point(lam0, y, params)
    d = params.d
    log_core = math.log(point.q) + lam0 * point.u
    log_psi = log_core - (0.5 * d + 1.0) * math.log(lam0)
    log_psi_alt = 0.5 * d * (math.log(2.0 / d) + math.log(z - point.u)) + log_core - math.log(lam0)
    return PsiValue(y=float(y), log_psi=log_psi, log_psi_alt=log_psi_alt, lam0=lam0, u0=point.u, q0=point.q)


def log_psi_derivative(y: float, params: ModelParams) -> float:
    """``d log ψ/dy = (λ₀/m)·(K(λ₀, y) − M)``."""

    lam0 = solve_lambda_given_y(y, params)
    return lam0 / params.m * (buoyancy_K(lam0, y, params) - params.M)


def psi_slope_sign(y: float, params: ModelParams) -> int:
    return int(np.sign(log_psi_derivative(y, params)))


def psi_argmax(params: ModelParams) -> float:
    """Height where ``ψ`` peaks: ``R`` if the slope is already non-positive there."""

    if params.M <= 0.0:
        raise InvalidParameterError("psi has no interior maximum without ball mass")
    if log_psi_derivative(params.R, params) <= 0.0:
        return params.R
    span = params.ceiling - params.R
    upper = _upper_height(params)
    return float(
        optimize.brentq(log_psi_derivative, params.R, upper, args=(params,), xtol=1e-15 * span, rtol=1e-15)
    )


def uniqueness_probe(params: ModelParams, points: int = 1000) -> int:
    """Number of sign changes of ``K(λ_y, y) − M`` on a uniform interior grid."""

    span = params.ceiling - params.R
    grid = params.R + span * (np.arange(points) + 0.5) / points
    values = np.array([_height_residual(float(y), params) for y in grid])
    signs = np.sign(values)
    signs = signs[signs != 0]
    return int(np.count_nonzero(signs[1:] != signs[:-1]))


@dataclass(frozen=True)
class HeightProfile:
    n_particles: int
    y_grid: np.ndarray
    log_psi: np.ndarray
    density: np.ndarray
    normalization: float

    @property
    def psi_argmax(self) -> float:
        return float(self.y_grid[int(np.argmax(self.log_psi))])

    def cdf(self, y: np.ndarray) -> np.ndarray:
        cumulative = integrate.cumulative_trapezoid(self.density, self.y_grid, initial=0.0)
        cumulative /= cumulative[-1]
        return np.interp(y, self.y_grid, cumulative, left=0.0, right=1.0)

    def mass_outside(self, center: float, eps: float) -> float:
        return concentration_mass(self, center, eps)

    def mean(self) -> float:
        return float(integrate.simpson(self.y_grid * self.density, x=self.y_grid))


def _graded_side(peak: float, end: float, intervals: int, scale: float) -> np.ndarray:
    """Points from *peak* to *end*, spaced proportionally to the distance from the peak."""

    length = end - peak
    if length == 0.0:
        return np.array([peak])
    rate = math.log1p(abs(length) / scale)
    s = np.linspace(0.0, 1.0, intervals + 1)
    side = peak + length * np.expm1(rate * s) / math.expm1(rate)
    side[-1] = end
    return side


def default_height_grid(params: ModelParams, n_particles: int, points: int = DEFAULT_GRID_POINTS) -> np.ndarray:
    """Graded grid on ``[R, E/(Mg)]`` clustered on both sides of the peak of ψ.

    Each side is uniform in a mapped coordinate with an even number of
    intervals, so ``grid[::2]`` is the same grid built with half the points and
    the peak stays on both.
    """

    span = params.ceiling - params.R
    intervals = max(2, 2 * (points // 4))
    peak = psi_argmax(params)
    scale = GRID_PEAK_FRACTION * span / math.sqrt(max(n_particles, 1))
    left = _graded_side(peak, params.R, intervals, scale)
    right = _graded_side(peak, params.ceiling, intervals, scale)
    return np.concatenate([left[::-1], right[1:]])


def _evaluate_log_psi(grid: np.ndarray, params: ModelParams) -> np.ndarray:
    values = np.full(grid.shape, -np.inf)
    for i, y in enumerate(grid):
        if y < params.ceiling:
            values[i] = psi_of_y(float(y), params).log_psi
    return values


def ball_height_density(
    n_particles: int,
    params: ModelParams,
    y_grid: Optional[np.ndarray] = None,
) -> HeightProfile:
    """Normalized ``ψ^{n−1}(y)·z^d(y)`` on ``[R, E/(Mg))``.

    The normalization is checked against the same integral on every other grid
    point, which for the default grid is the grid at half resolution; a
    mismatch above 1e−6 raises :class:`GridTooCoarseError`.
    """

    if params.M <= 0.0:
        raise InvalidParameterError("the ball-height density needs a ball with positive mass")
    if n_particles < 1:
        raise InvalidParameterError("n_particles must be at least 1")
    grid = np.asarray(y_grid if y_grid is not None else default_height_grid(params, n_particles), dtype=float)
    if np.any(grid < params.R) or np.any(grid > params.ceiling) or np.any(np.diff(grid) <= 0):
        raise OutOfRangeError("height grid must increase within [R, E/(Mg)]")

    log_psi = _evaluate_log_psi(grid, params)
    z = (params.E - params.M * params.g * grid) / (params.m * params.g)
    with np.errstate(divide="ignore"):
        log_density = (n_particles - 1) * log_psi + params.d * np.log(np.clip(z, 0.0, None))
    log_density[~np.isfinite(log_psi)] = -np.inf
    log_density -= np.max(log_density)
    unnormalized = np.exp(log_density)

    fine = integrate.simpson(unnormalized, x=grid)
    coarse = integrate.simpson(unnormalized[::2], x=grid[::2])
    if abs(fine - coarse) > NORMALIZATION_RTOL * fine:
        raise GridTooCoarseError(
            f"density normalization moved by {abs(fine - coarse) / fine:.2e} under grid refinement"
        )
    return HeightProfile(
        n_particles=n_particles,
        y_grid=grid,
        log_psi=log_psi,
        density=unnormalized / fine,
        normalization=float(fine),
    )


def concentration_mass(profile: HeightProfile, center: float, eps: float) -> float:
    """Probability mass of the profile farther than *eps* from *center*."""

    outside = np.where(np.abs(profile.y_grid - center) > eps, profile.density, 0.0)
    return float(integrate.trapezoid(outside, profile.y_grid))


def _solve_for_mass(args: Tuple[ModelParams, float]) -> Tuple[float, float, bool]:
    params, mass = args
    solution = solve_or_rest(ModelParams(**{**params.model_dump(), "M": mass}))
    return mass, solution.y_A, solution.floating


def mass_scan(params: ModelParams, masses: Sequence[float], *, workers: int = 1) -> List[Tuple[float, float, bool]]:
    """``(M, y_A, floating)`` for each ball mass, ordered as *masses*."""

    jobs = [(params, float(mass)) for mass in masses]
    if workers <= 1 or len(jobs) <= 1:
        return [_solve_for_mass(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_solve_for_mass, jobs))


__all__ = [
    "EquilibriumSolution",
    "HeightProfile",
    "PsiValue",
    "ball_height_density",
    "beta_y",
    "buoyancy_K",
    "concentration_mass",
    "default_height_grid",
    "energy_G",
    "floating_condition",
    "kappa_y",
    "lambda_star",
    "log_psi_derivative",
    "mass_scan",
    "predicted_kinetic_energy",
    "psi_argmax",
    "psi_of_y",
    "psi_slope_sign",
    "resting_solution",
    "solve_archimedes",
    "solve_lambda_given_y",
    "solve_or_rest",
    "u0_of_y",
    "uniqueness_probe",
    "z_of_y",
]
