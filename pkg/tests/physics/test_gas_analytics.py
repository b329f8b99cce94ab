import math

import numpy as np
import pytest
from scipy import integrate

from errors import InvalidParameterError
from physics.gas_analytics import (
    analytic_partials,
    exact_slab_volume,
    gas_law_point,
    h_n,
    h_n_partial_gamma,
    h_n_partial_y,
    lambda_of_u,
    log_slab_volume_all_centers,
    pel_identity_check,
    phase_volume_estimate,
    sample_base_points,
    slab_volume_monte_carlo,
)
from physics.geometry import ModelParams, ball_slice_area


def _direct_moment(order, gamma, y, params):
    def integrand(h):
        return ball_slice_area(y, h, params) * gamma * h**order * math.exp(-gamma * h)

    excluded, _ = integrate.quad(integrand, y - params.R, y + params.R, epsabs=0.0, epsrel=1e-12, limit=200)
    return params.base_area * math.factorial(order) / gamma**order - excluded


def test_moments_without_ball_are_closed_form(no_ball_params):
    for order in range(3):
        expected = no_ball_params.base_area * math.factorial(order) / 0.7**order
        assert h_n(order, 0.7, 0.0, no_ball_params) == pytest.approx(expected, rel=1e-15)


@pytest.mark.parametrize("gamma,y", [(0.3, 0.3), (1.0, 0.8), (4.0, 2.5)])
def test_moments_match_direct_quadrature(floating_params_3d, gamma, y):
    for order in range(3):
        assert h_n(order, gamma, y, floating_params_3d) == pytest.approx(
            _direct_moment(order, gamma, y, floating_params_3d), rel=1e-10
        )


def test_partials_of_moments_match_central_differences(floating_params):
    gamma, y = 0.9, 1.1
    for order in range(3):
        step = 1e-5 * gamma
        numeric = (h_n(order, gamma + step, y, floating_params) - h_n(order, gamma - step, y, floating_params)) / (
            2.0 * step
        )
        assert h_n_partial_gamma(order, gamma, y, floating_params) == pytest.approx(numeric, rel=1e-6, abs=1e-8)

        step = 1e-5
        numeric = (h_n(order, gamma, y + step, floating_params) - h_n(order, gamma, y - step, floating_params)) / (
            2.0 * step
        )
        assert h_n_partial_y(order, gamma, y, floating_params) == pytest.approx(numeric, rel=1e-5, abs=1e-9)


def test_gas_law_point_is_consistent(floating_params):
    point = gas_law_point(0.8, 1.0, floating_params)
    assert 0.0 < point.q < floating_params.base_area
    assert point.u > 0.0
    assert point.sigma2 == pytest.approx(point.w / point.q - point.u**2)
    assert point.sigma2 > 0.0
    assert point.satisfies_bounds
    assert set(point.bound_certificates()) == {
        "q_ratio",
        "lambda_u",
        "lambda2_sigma2",
        "u2_over_sigma2",
        "sigma2_positive",
    }


@pytest.mark.parametrize("gamma", [1e-3, 1.0, 1e3])
@pytest.mark.parametrize("y", [0.3, 5.0, 50.0])
def test_bounds_hold_across_the_certified_range(floating_params, floating_params_3d, gamma, y):
    for params in (floating_params, floating_params_3d):
        assert gas_law_point(gamma / params.rho_b, y * params.rho_b, params).satisfies_bounds


def test_ball_below_its_radius_is_rejected(floating_params):
    with pytest.raises(InvalidParameterError):
        gas_law_point(1.0, 0.1, floating_params)
    with pytest.raises(InvalidParameterError):
        h_n(0, -1.0, 1.0, floating_params)


@pytest.mark.parametrize("gamma,y", [(0.05, 0.3), (1.3, 0.9), (19.0, 4.0)])
def test_lambda_of_u_inverts_mean_height(floating_params, gamma, y):
    u = gas_law_point(gamma, y, floating_params).u
    assert lambda_of_u(u, y, floating_params) == pytest.approx(gamma, rel=1e-10)


def test_lambda_of_u_without_ball_is_reciprocal(no_ball_params):
    assert lambda_of_u(2.5, 0.0, no_ball_params) == pytest.approx(0.4, rel=1e-15)


def test_lambda_of_u_rejects_non_positive_height(floating_params):
    with pytest.raises(InvalidParameterError):
        lambda_of_u(0.0, 1.0, floating_params)


def test_analytic_partials_match_finite_differences(floating_params):
    u, y = 1.2, 0.9
    exact = analytic_partials(u, y, floating_params)
    h = 1e-5

    def lam(uu, yy):
        return lambda_of_u(uu, yy, floating_params)

    def q(uu, yy):
        return gas_law_point(lam(uu, yy), yy, floating_params).q

    assert exact.dlam_du == pytest.approx((lam(u + h, y) - lam(u - h, y)) / (2 * h), rel=1e-5, abs=1e-7)
    assert exact.dlam_dy == pytest.approx((lam(u, y + h) - lam(u, y - h)) / (2 * h), rel=1e-5, abs=1e-7)
    assert exact.dq_du == pytest.approx((q(u + h, y) - q(u - h, y)) / (2 * h), rel=1e-5, abs=1e-7)
    assert exact.dq_dy == pytest.approx((q(u, y + h) - q(u, y - h)) / (2 * h), rel=1e-5, abs=1e-7)


def test_partition_derivative_identity(floating_params):
    assert pel_identity_check(1.0, 1.0, floating_params) < 1e-6


def test_exact_slab_volume_two_particles(floating_params):
    volume = exact_slab_volume(2, 0.7, floating_params).value
    assert volume == pytest.approx(floating_params.base_area**2 * 0.7 * math.sqrt(2.0))


def test_phase_volume_estimate_for_simplex_is_close():
    params = ModelParams(d=2, rho_b=0.5, R=0.0, m=1.0, M=0.0, g=1.0, E=1.0)
    estimate = phase_volume_estimate(3, 0.0, 1.0, params).value
    assert estimate == pytest.approx(math.sqrt(3.0) / 2.0, rel=0.35)


def test_phase_volume_requires_two_particles(floating_params):
    with pytest.raises(InvalidParameterError):
        phase_volume_estimate(1, 1.0, 1.0, floating_params)
    with pytest.raises(InvalidParameterError):
        exact_slab_volume(1, 1.0, floating_params)
    with pytest.raises(InvalidParameterError):
        log_slab_volume_all_centers(1, 1.0, 1.0, floating_params)


def test_monte_carlo_without_ball_is_exact(no_ball_params, rng):
    volume, stderr = slab_volume_monte_carlo(3, 0.0, 1.0, no_ball_params, rng, samples=1000)
    assert volume == pytest.approx(exact_slab_volume(3, 1.0, no_ball_params).value)
    assert stderr == 0.0


def test_monte_carlo_with_ball_removes_volume(floating_params, rng):
    volume, stderr = slab_volume_monte_carlo(3, 0.5, 0.5, floating_params, rng, samples=20_000)
    full = exact_slab_volume(3, 0.5, floating_params).value
    assert 0.0 < volume < full
    assert stderr > 0.0


def test_sample_base_points_stay_inside(rng):
    points = sample_base_points(rng, (500,), 3, 0.8)
    assert points.shape == (500, 2)
    assert np.all(np.linalg.norm(points, axis=1) <= 0.8)


def test_all_centers_volume_is_finite(floating_params):
    assert math.isfinite(log_slab_volume_all_centers(5, 1.0, 1.0, floating_params))
