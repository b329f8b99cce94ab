import math

import numpy as np
import pytest

from dynamics.kernels import (
    flight_positions,
    floor_time,
    floor_times,
    free_flight,
    sidewall_time,
    sidewall_times,
    time_to_ball,
    times_to_ball,
)
from sampling.state import SystemState


def test_floor_time_rising_and_falling():
    assert floor_time(2.0, 0.0, 1.0) == pytest.approx(2.0)
    assert floor_time(0.0, 1.0, 1.0) == pytest.approx(2.0)
    assert floor_time(0.0, -1.0, 1.0) == 0.0
    assert floor_time(-1e-17, 0.0, 1.0) == 0.0


def test_floor_times_match_scalar_kernel():
    heights = np.array([0.0, 0.5, 2.0, 3.0])
    vys = np.array([1.0, -0.3, 0.0, 2.5])
    expected = [floor_time(h, v, 9.81) for h, v in zip(heights, vys)]
    np.testing.assert_allclose(floor_times(heights, vys, 9.81), expected, rtol=1e-14)


def test_sidewall_time_from_inside():
    assert sidewall_time(np.array([0.0]), np.array([1.0]), 1.0) == pytest.approx(1.0)
    assert sidewall_time(np.array([0.5]), np.array([1.0]), 1.0) == pytest.approx(0.5)
    assert sidewall_time(np.array([0.5]), np.array([-1.0]), 1.0) == pytest.approx(1.5)
    assert sidewall_time(np.array([0.2, 0.1]), np.zeros(2), 1.0) == math.inf


def test_sidewall_times_match_scalar_kernel():
    xs = np.array([[0.0, 0.0], [0.3, -0.4], [0.1, 0.2]])
    vxs = np.array([[1.0, 1.0], [-0.2, 0.5], [0.0, 0.0]])
    expected = [sidewall_time(x, v, 1.0) for x, v in zip(xs, vxs)]
    np.testing.assert_allclose(sidewall_times(xs, vxs, 1.0), expected, rtol=1e-14)


def test_time_to_ball_head_on_miss_and_separating():
    assert time_to_ball(np.array([0.0, 2.0]), np.array([0.0, -1.0]), 1.0) == pytest.approx(1.0)
    assert time_to_ball(np.array([2.0, 2.0]), np.array([0.0, -1.0]), 1.0) is None
    assert time_to_ball(np.array([0.0, 2.0]), np.array([0.0, 1.0]), 1.0) is None


def test_time_to_ball_ignores_grazing_contact():
    assert time_to_ball(np.array([1.0, 2.0]), np.array([0.0, -1.0]), 1.0) is None


def test_times_to_ball_matches_scalar_kernel():
    dps = np.array([[0.0, 2.0], [2.0, 2.0], [0.3, 1.5], [0.0, 2.0]])
    dvs = np.array([[0.0, -1.0], [0.0, -1.0], [-0.1, -2.0], [0.0, 1.0]])
    times = times_to_ball(dps, dvs, 1.0)
    for row, (dp, dv) in enumerate(zip(dps, dvs)):
        scalar = time_to_ball(dp, dv, 1.0)
        if scalar is None:
            assert times[row] == math.inf
        else:
            assert times[row] == pytest.approx(scalar, rel=1e-14)


def test_free_flight_follows_a_parabola():
    state = SystemState(
        positions=np.array([[0.1, 1.0], [0.0, 2.0]]),
        velocities=np.array([[0.5, 1.0], [0.0, 0.0]]),
    )
    free_flight(state, 0.5, 2.0)
    np.testing.assert_allclose(state.positions[0], [0.35, 1.25])
    np.testing.assert_allclose(state.velocities[0], [0.5, 0.0])
    np.testing.assert_allclose(state.positions[1], [0.0, 1.75])
    assert state.time == pytest.approx(0.5)


def test_free_flight_rejects_negative_time():
    state = SystemState(positions=np.zeros((1, 2)), velocities=np.zeros((1, 2)))
    with pytest.raises(ValueError):
        free_flight(state, -1.0, 1.0)


def test_flight_positions_do_not_mutate_inputs():
    p0 = np.array([[0.0, 1.0], [0.5, 0.0]])
    v0 = np.array([[1.0, 0.0], [0.0, 2.0]])
    out = flight_positions(p0, v0, np.array([1.0, 0.5]), 1.0)
    np.testing.assert_allclose(out, [[1.0, 0.5], [0.5, 0.875]])
    np.testing.assert_array_equal(p0, [[0.0, 1.0], [0.5, 0.0]])
