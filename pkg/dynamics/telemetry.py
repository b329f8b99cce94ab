"""Counters collected while a simulation runs."""
from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from typing import Dict, Optional


@dataclass
class SimulationTelemetry:
    counters: Dict[str, int] = field(default_factory=lambda: {
        "events": 0,
        "particle-bottom": 0,
        "particle-sidewall": 0,
        "particle-ball": 0,
        "ball-bottom": 0,
        "ball-sidewall": 0,
        "stale_pops": 0,
        "ball_epochs": 0,
        "heap_compactions": 0,
        "observations": 0,
    })
    initial_energy: float = 0.0
    final_energy: float = 0.0
    max_event_energy_error: float = 0.0
    max_horizontal_speed: float = 0.0
    simulated_time: float = 0.0
    wall_seconds: float = 0.0
    _started: Optional[float] = None

    def incr(self, key: str, amount: int = 1) -> None:
        self.counters[key] = self.counters.get(key, 0) + amount

    def set(self, key: str, value: int) -> None:
        self.counters[key] = value

    def snapshot(self) -> Dict[str, int]:
        return dict(self.counters)

    def start(self, energy: float) -> None:
        self.initial_energy = energy
        self.final_energy = energy
        self._started = time.perf_counter()

    def finish(self, energy: float, simulated_time: float) -> None:
        self.final_energy = energy
        self.simulated_time = simulated_time
        if self._started is not None:
            self.wall_seconds = time.perf_counter() - self._started

    def observe_horizontal_speed(self, speed: float) -> None:
        if speed > self.max_horizontal_speed:
            self.max_horizontal_speed = speed

    @property
    def energy_drift(self) -> float:
        if self.initial_energy == 0.0:
            return 0.0
        return abs(self.final_energy - self.initial_energy) / abs(self.initial_energy)

    def to_dict(self) -> Dict[str, object]:
        return {
            "counters": self.snapshot(),
            "initial_energy": self.initial_energy,
            "final_energy": self.final_energy,
            "energy_drift": self.energy_drift,
            "max_event_energy_error": self.max_event_energy_error,
            "max_horizontal_speed": self.max_horizontal_speed,
            "simulated_time": self.simulated_time,
            "wall_seconds": self.wall_seconds,
        }

    def export_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, indent=2)


__all__ = ["SimulationTelemetry"]
