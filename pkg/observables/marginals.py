"""Height marginal of the limiting gas distribution around a fixed ball."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import integrate

from errors import GridTooCoarseError, InvalidParameterError
from physics.gas_analytics import gas_law_point
from physics.geometry import ModelParams, ball_slice_area, unit_ball_volume

NOTCH_POINTS = 4097
NORMALIZATION_RTOL = 1e-8


@dataclass(frozen=True)
class PredictedMarginal:
    """Density ``(|D_b| − slice(y))·λe^{−λy}/q`` of a particle's height."""

    lam: float
    ball_y: float
    params: ModelParams
    q: float
    y_grid: np.ndarray
    density: np.ndarray
    _notch_phi: np.ndarray
    _notch_cumulative: np.ndarray

    def pdf(self, y: np.ndarray) -> np.ndarray:
        return _density(np.asarray(y, dtype=float), self.lam, self.ball_y, self.q, self.params)

    def _notch_mass(self, y: np.ndarray) -> np.ndarray:
        R = self.params.R
        if R == 0.0:
            return np.zeros_like(y)
        offset = np.clip((y - self.ball_y) / R, -1.0, 1.0)
        return np.interp(np.arcsin(offset), self._notch_phi, self._notch_cumulative)

    def cdf(self, y: np.ndarray) -> np.ndarray:
        y = np.clip(np.asarray(y, dtype=float), 0.0, None)
        base = self.params.base_area * -np.expm1(-self.lam * y)
        return np.clip((base - self._notch_mass(y)) / self.q, 0.0, 1.0)

    def mean(self) -> float:
        return gas_law_point(self.lam, self.ball_y, self.params).u


def _density(y: np.ndarray, lam: float, ball_y: float, q: float, params: ModelParams) -> np.ndarray:
    free = params.base_area - ball_slice_area(ball_y, y, params)
    return np.where(y >= 0.0, free * lam * np.exp(-lam * np.clip(y, 0.0, None)) / q, 0.0)


def _notch_integrand(phi: np.ndarray, lam: float, ball_y: float, params: ModelParams) -> np.ndarray:
    R = params.R
    heights = ball_y + R * np.sin(phi)
    return unit_ball_volume(params.d - 1) * R ** params.d * np.cos(phi) ** params.d * lam * np.exp(-lam * heights)


def predicted_height_marginal(
    lam: float,
    ball_y: float,
    params: ModelParams,
    y_grid: Optional[np.ndarray] = None,
) -> PredictedMarginal:
    """Height marginal of ν for rate *lam* with the ball centred at *ball_y*.

    The normalization is cross-checked against ``q = ℋ₀(λ, y')``.
    """

    if not lam > 0.0:
        raise InvalidParameterError(f"rate must be positive, got {lam!r}")
    if ball_y < params.R:
        raise InvalidParameterError(f"ball height {ball_y!r} lies below its radius {params.R!r}")
    q = gas_law_point(lam, ball_y, params).q
    half = 0.5 * math.pi
    phi = np.linspace(-half, half, NOTCH_POINTS)
    if params.R > 0.0:
        notch_total, _ = integrate.quad(
            lambda p: float(_notch_integrand(np.asarray(p), lam, ball_y, params)),
            -half,
            half,
            epsabs=0.0,
            epsrel=1e-12,
        )
        if abs(params.base_area - notch_total - q) > NORMALIZATION_RTOL * q:
            raise GridTooCoarseError(
                f"marginal normalization {params.base_area - notch_total!r} disagrees with q={q!r}"
            )
        cumulative = integrate.cumulative_trapezoid(_notch_integrand(phi, lam, ball_y, params), phi, initial=0.0)
        cumulative *= notch_total / cumulative[-1]
    else:
        cumulative = np.zeros_like(phi)
    if y_grid is None:
        y_grid = np.linspace(0.0, max(8.0 / lam, ball_y + 2.0 * params.R), 1025)
    y_grid = np.asarray(y_grid, dtype=float)
    return PredictedMarginal(
        lam=float(lam),
        ball_y=float(ball_y),
        params=params,
        q=q,
        y_grid=y_grid,
        density=_density(y_grid, lam, ball_y, q, params),
        _notch_phi=phi,
        _notch_cumulative=cumulative,
    )


__all__ = ["PredictedMarginal", "predicted_height_marginal"]
