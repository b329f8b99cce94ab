import numpy as np
import pytest

from dynamics.events import EventKind, EventQueue
from dynamics.flight import FlightBook
from dynamics.simulator import Simulator
from dynamics.telemetry import SimulationTelemetry
from errors import EventOrderError
from sampling.state import SystemState, initial_state


def _queue(state, params):
    book = FlightBook(state, params.g, static_ball=params.M == 0.0)
    queue = EventQueue(book, params, SimulationTelemetry())
    queue.schedule_all(state.time)
    return queue


def test_kind_ranks_and_ball_flags():
    assert [kind.rank for kind in EventKind] == [0, 1, 2, 3, 4]
    assert EventKind.PARTICLE_BALL.involves_ball
    assert not EventKind.PARTICLE_BOTTOM.involves_ball


def test_first_event_matches_full_recompute(floating_params, rng):
    state = initial_state(floating_params, rng)
    queue = _queue(state, floating_params)
    expected = queue.full_recompute_next(state.time)
    event = queue.next_event()
    assert event.kind is expected.kind
    assert event.index == expected.index
    assert event.time == pytest.approx(expected.time, rel=1e-12)


def test_single_falling_particle_hits_the_floor(floating_params):
    params = floating_params.with_particles(1)
    positions = np.array([[0.9, 0.5], [0.0, 2.0]])
    velocities = np.zeros((2, 2))
    queue = _queue(SystemState(positions, velocities), params)
    event = queue.next_event()
    assert event.kind is EventKind.PARTICLE_BOTTOM
    assert event.index == 0
    assert event.time == pytest.approx(1.0)


def test_rescheduling_invalidates_old_entries(floating_params, rng):
    state = initial_state(floating_params, rng)
    queue = _queue(state, floating_params)
    before = len(queue)
    queue.schedule_particle(0, state.time)
    assert len(queue) > before
    seen = set()
    while True:
        try:
            event = queue.next_event()
        except EventOrderError:
            break
        key = (event.kind, event.index)
        assert key not in seen
        seen.add(key)
    walls = {index for kind, index in seen if kind in (EventKind.PARTICLE_BOTTOM, EventKind.PARTICLE_SIDEWALL)}
    assert walls == set(range(floating_params.n))
    assert queue.telemetry.counters["stale_pops"] >= 1


def test_lazy_queue_agrees_with_recompute_over_many_events(floating_params_3d, rng):
    sim = Simulator(initial_state(floating_params_3d, rng), floating_params_3d, check_queue=True)
    result = sim.run_events(1500)
    assert result.events == 1500


def test_empty_queue_raises(floating_params, rng):
    queue = _queue(initial_state(floating_params, rng), floating_params)
    queue._heap.clear()
    with pytest.raises(EventOrderError):
        queue.next_event()
