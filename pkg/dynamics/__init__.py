"""Event-driven dynamics of the gas particles and the ball."""
from .events import Event, EventKind, EventQueue
from .flight import FlightBook
from .kernels import free_flight, time_to_ball
from .reflection import ReflectionMode, reflect_wall, resolve_particle_ball
from .simulator import SimulationObserver, SimulationResult, Simulator, simulate
from .telemetry import SimulationTelemetry
from .trace import (
    DenseEvent,
    EventLogRecorder,
    TrajectoryRecorder,
    apply_dense_event,
    dense_integrate,
    dense_next_event,
)

__all__ = [
    "DenseEvent",
    "Event",
    "EventKind",
    "EventLogRecorder",
    "EventQueue",
    "FlightBook",
    "ReflectionMode",
    "SimulationObserver",
    "SimulationResult",
    "SimulationTelemetry",
    "Simulator",
    "TrajectoryRecorder",
    "apply_dense_event",
    "dense_integrate",
    "dense_next_event",
    "free_flight",
    "reflect_wall",
    "resolve_particle_ball",
    "simulate",
    "time_to_ball",
]
