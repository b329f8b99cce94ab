import math

import numpy as np
import pytest
from scipy import integrate

from errors import InvalidParameterError
from observables.summary import (
    EmpiricalSummary,
    SummaryObserver,
    ball_bin_edges,
    bin_counts,
    bin_index,
    default_bin_edges,
    height_integrals,
    parabola_occupation,
    uniform_coordinate,
)
from physics.equilibrium import solve_or_rest

EDGES = np.linspace(0.0, 4.0, 9)


def test_bin_index_uses_an_overflow_slot():
    edges = np.array([0.0, 1.0, 2.0])
    np.testing.assert_array_equal(bin_index(np.array([0.0, 0.5, 1.0, 1.9, 2.0, 7.0]), edges), [0, 0, 1, 1, 2, 2])
    np.testing.assert_array_equal(bin_counts([0.1, 0.2, 5.0], edges), [2, 0, 1])


def test_default_edges_cover_the_floating_height(floating_params):
    edges = default_bin_edges(floating_params, bins=32)
    assert len(edges) == 33
    assert edges[0] == 0.0
    assert edges[-1] >= solve_or_rest(floating_params).y_A + 2.0 * floating_params.R


@pytest.mark.parametrize(
    "y0, vy, g, duration",
    [(1.0, 2.0, 1.0, 4.0), (3.5, -0.5, 2.0, 1.2), (0.2, 0.0, 0.0, 3.0), (0.0, 1.0, 0.0, 3.9)],
)
def test_parabola_occupation_sums_to_duration(y0, vy, g, duration):
    occupation = parabola_occupation(y0, vy, g, duration, EDGES)
    assert occupation.sum() == pytest.approx(duration, rel=1e-12)
    assert np.all(occupation >= 0.0)


def test_parabola_occupation_exact_values():
    occupation = parabola_occupation(2.0, 0.0, 1.0, 2.0, np.array([0.0, 1.0, 2.0]))
    np.testing.assert_allclose(occupation, [2.0 - math.sqrt(2.0), math.sqrt(2.0), 0.0])
    linear = parabola_occupation(0.0, 1.0, 0.0, 1.0, np.array([0.0, 0.25, 0.5, 0.75, 1.0]))
    np.testing.assert_allclose(linear, [0.25, 0.25, 0.25, 0.25, 0.0])
    assert parabola_occupation(1.0, 0.0, 1.0, 0.0, EDGES).sum() == 0.0


def test_height_integrals_match_quadrature():
    y0, vy, g, t = 1.0, 2.0, 9.81, 0.5
    first, second = height_integrals(y0, vy, g, t)
    path = lambda s: y0 + vy * s - 0.5 * g * s * s
    assert first == pytest.approx(integrate.quad(path, 0.0, t)[0], rel=1e-12)
    assert second == pytest.approx(integrate.quad(lambda s: path(s) ** 2, 0.0, t)[0], rel=1e-12)


def test_uniform_coordinate():
    np.testing.assert_allclose(uniform_coordinate(np.array([[-0.7], [0.0], [0.7]]), 0.7), [0.0, 0.5, 1.0])
    np.testing.assert_allclose(uniform_coordinate(np.array([[0.0, 0.0], [0.0, 0.5]]), 0.5), [0.0, 1.0])


def _summary(rng, segments=3, snapshots=4):
    summary = EmpiricalSummary(bin_edges=EDGES, n_particles=5, particle_mass=0.2, ball_mass=0.1)
    for _ in range(segments):
        summary.add_ball_segment(rng.uniform(0.5, 3.0), rng.normal(), 1.0, rng.uniform(0.1, 1.0))
    for _ in range(snapshots):
        positions = rng.uniform(0.0, 3.0, size=(6, 2))
        velocities = rng.normal(size=(6, 2))
        summary.add_snapshot(positions, velocities, 0.7)
    summary.events = {"particle-bottom": int(rng.integers(1, 10))}
    return summary


def test_merge_is_associative(rng):
    a, b, c = _summary(rng), _summary(rng), _summary(rng)
    left = a.merge(b).merge(c)
    right = a.merge(b.merge(c))
    np.testing.assert_array_equal(left.gas_counts, right.gas_counts)
    np.testing.assert_array_equal(left.ball_x_counts, right.ball_x_counts)
    np.testing.assert_allclose(left.ball_occupation, right.ball_occupation, rtol=1e-14)
    assert left.ball_time == pytest.approx(right.ball_time, rel=1e-14)
    assert left.observations == right.observations == 12
    assert left.total_events == right.total_events
    assert left.particle_ke[0] == pytest.approx(right.particle_ke[0], rel=1e-14)


def test_merge_rejects_different_edges(rng):
    other = EmpiricalSummary(bin_edges=np.linspace(0.0, 1.0, 5))
    with pytest.raises(InvalidParameterError):
        _summary(rng).merge(other)
    shifted = EmpiricalSummary(bin_edges=EDGES, ball_edges=EDGES + 0.5)
    with pytest.raises(InvalidParameterError):
        _summary(rng).merge(shifted)


def test_kinetic_energy_conventions():
    summary = EmpiricalSummary(bin_edges=EDGES, n_particles=2, particle_mass=0.5, ball_mass=0.1)
    velocities = np.array([[1.0, 0.0], [0.0, 3.0], [2.0, 0.0]])
    summary.add_snapshot(np.ones((3, 2)), velocities, 0.0)
    literal, _ = summary.particle_ke_literal
    total, _ = summary.particle_ke
    assert literal == pytest.approx(0.5 * 0.5 * 5.0)
    assert total == pytest.approx(0.5 * 1.0 * 5.0)
    assert summary.ball_ke[0] == pytest.approx(0.5 * 0.1 * 4.0)
    assert math.isnan(summary.ball_ke[1])


def test_constant_ball_height_statistics():
    summary = EmpiricalSummary(bin_edges=EDGES)
    summary.add_ball_segment(1.3, 0.0, 0.0, 2.0)
    assert summary.ball_height_mean == pytest.approx(1.3)
    assert summary.ball_height_std == pytest.approx(0.0, abs=1e-7)
    assert summary.ball_histogram[2] == pytest.approx(1.0)


def test_observer_trims_segments_to_the_window():
    observer = SummaryObserver(EDGES, window_start=1.0)
    observer.on_ball_segment(0.0, 0.5, 2.0, 0.0, 1.0)
    assert observer.summary.ball_time == 0.0
    observer.on_ball_segment(0.0, 2.0, 2.0, 1.0, 1.0)
    assert observer.summary.ball_time == pytest.approx(1.0)
    first, _ = height_integrals(2.5, 0.0, 1.0, 1.0)
    assert observer.summary.ball_height_integral == pytest.approx(first)
    observer.on_sample(0.5, np.ones((3, 2)), np.zeros((3, 2)))
    assert observer.summary.observations == 0


def test_to_row_lists_events_and_ks(rng):
    summary = _summary(rng)
    summary.ks["gas_height"] = 0.01
    row = summary.to_row()
    assert row["events_particle-bottom"] == summary.events["particle-bottom"]
    assert row["ks_gas_height"] == 0.01
    assert row["observations"] == 4


def test_ball_edges_span_every_reachable_height(floating_params, no_ball_params):
    edges = ball_bin_edges(floating_params, bins=40)
    assert len(edges) == 41
    assert edges[0] == floating_params.R
    assert edges[-1] == floating_params.ceiling
    assert edges[-1] > default_bin_edges(floating_params)[-1]
    np.testing.assert_array_equal(ball_bin_edges(no_ball_params, bins=16), default_bin_edges(no_ball_params, bins=16))


def test_ball_occupation_uses_its_own_edges():
    summary = EmpiricalSummary(bin_edges=EDGES, ball_edges=np.linspace(0.0, 40.0, 5))
    summary.add_ball_segment(25.0, 0.0, 0.0, 2.0)
    assert len(summary.ball_occupation) == 5
    assert len(summary.gas_counts) == len(EDGES)
    np.testing.assert_allclose(summary.ball_histogram, [0.0, 0.0, 1.0, 0.0, 0.0])
