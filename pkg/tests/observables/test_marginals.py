import numpy as np
import pytest
from scipy import integrate

from errors import InvalidParameterError
from observables.marginals import predicted_height_marginal


def test_pure_gas_marginal_is_exponential(no_ball_params):
    lam = 1.7
    marginal = predicted_height_marginal(lam, 1.0, no_ball_params)
    y = np.linspace(0.0, 5.0, 21)
    np.testing.assert_allclose(marginal.cdf(y), 1.0 - np.exp(-lam * y), atol=1e-12)
    np.testing.assert_allclose(marginal.pdf(y), lam * np.exp(-lam * y), rtol=1e-12)
    assert marginal.mean() == pytest.approx(1.0 / lam, rel=1e-10)


@pytest.mark.parametrize("fixture", ["floating_params", "floating_params_3d"])
def test_density_integrates_to_one(fixture, request):
    params = request.getfixturevalue(fixture)
    marginal = predicted_height_marginal(2.0, 1.0, params)
    y = np.linspace(0.0, 20.0, 200_001)
    assert integrate.trapezoid(marginal.pdf(y), y) == pytest.approx(1.0, rel=1e-5)
    assert marginal.cdf(np.array([0.0]))[0] == 0.0
    assert marginal.cdf(np.array([40.0]))[0] == pytest.approx(1.0, abs=1e-8)


def test_cdf_matches_integrated_density(floating_params):
    marginal = predicted_height_marginal(2.0, 1.0, floating_params)
    y = np.linspace(0.0, 2.0, 40_001)
    running = integrate.cumulative_trapezoid(marginal.pdf(y), y, initial=0.0)
    checkpoints = [0, 10_000, 14_000, 20_000, 26_000, 40_000]
    np.testing.assert_allclose(marginal.cdf(y[checkpoints]), running[checkpoints], atol=1e-5)


def test_density_dips_where_the_ball_sits(floating_params):
    marginal = predicted_height_marginal(2.0, 1.0, floating_params)
    below, centre = marginal.pdf(np.array([0.65, 1.0]))
    assert centre < below
    assert np.all(marginal.pdf(np.array([-1.0, -0.1])) == 0.0)
    assert np.all(np.diff(marginal.cdf(np.linspace(0.0, 4.0, 200))) >= 0.0)


def test_invalid_arguments(floating_params):
    with pytest.raises(InvalidParameterError):
        predicted_height_marginal(0.0, 1.0, floating_params)
    with pytest.raises(InvalidParameterError):
        predicted_height_marginal(1.0, 0.1, floating_params)
