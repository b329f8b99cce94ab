import math

import numpy as np
import pytest

from errors import EnergyExhaustedError, InvalidParameterError
from physics.gas_analytics import gas_law_point
from physics.geometry import admissible_mask
from sampling.exact import draw_nu, sample_nu, sample_velocities
from sampling.state import kinetic_energy


def test_velocities_lie_on_the_energy_sphere(floating_params, rng):
    velocities = sample_velocities(1.0, floating_params, rng)
    assert velocities.shape == (floating_params.n + 1, floating_params.d)
    assert kinetic_energy(velocities, floating_params) == pytest.approx(floating_params.E - 1.0, rel=1e-12)


def test_massless_ball_stays_at_rest(no_ball_params, rng):
    velocities = sample_velocities(0.5, no_ball_params, rng)
    np.testing.assert_array_equal(velocities[-1], np.zeros(no_ball_params.d))
    assert kinetic_energy(velocities, no_ball_params) == pytest.approx(1.5, rel=1e-12)


def test_no_kinetic_energy_left(floating_params, rng):
    with pytest.raises(EnergyExhaustedError):
        sample_velocities(floating_params.E, floating_params, rng)


def test_nu_draws_are_admissible(floating_params, rng):
    xs, ys = sample_nu(np.array([0.1]), 0.6, 1.2, floating_params, rng, size=2000)
    assert xs.shape == (2000, 1)
    assert np.all(admissible_mask(xs, ys, np.array([0.1]), 0.6, floating_params))


def test_nu_acceptance_rate_estimates_q(floating_params, rng):
    lam, y = 1.0, 0.5
    size = 20_000
    _, _, attempts = draw_nu(np.zeros(1), y, lam, floating_params, rng, size)
    rate = size / attempts
    expected = gas_law_point(lam, y, floating_params).q / floating_params.base_area
    stderr = math.sqrt(expected * (1.0 - expected) / attempts)
    assert abs(rate - expected) < 4.0 * stderr


def test_nu_mean_height_matches_u(floating_params_3d, rng):
    lam, y = 0.8, 1.0
    _, ys = sample_nu(np.zeros(2), y, lam, floating_params_3d, rng, size=40_000)
    point = gas_law_point(lam, y, floating_params_3d)
    stderr = math.sqrt(point.sigma2 / len(ys))
    assert abs(ys.mean() - point.u) < 4.0 * stderr


def test_nu_rejects_bad_arguments(floating_params, rng):
    with pytest.raises(InvalidParameterError):
        sample_nu(np.zeros(1), 1.0, 0.0, floating_params, rng)
    with pytest.raises(InvalidParameterError):
        sample_nu(np.zeros(1), 0.1, 1.0, floating_params, rng)
    with pytest.raises(InvalidParameterError):
        sample_nu(np.array([0.9]), 1.0, 1.0, floating_params, rng)
