"""Loading and hashing of TOML run configurations.

Layout::

    schema_version = 1

    [model]       # ModelParams fields
    [run]         # seed, out_dir, mode
    [mcmc]        # McmcConfig fields (the seed comes from [run])
    [simulation]  # duration, observation_interval, bins, trajectory, event_log, start
    [validate]    # tolerance_scale, cases, workers, slow
"""
from __future__ import annotations

import hashlib
import json
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

from pydantic import ValidationError

from dynamics.reflection import ReflectionMode
from errors import ConfigError, ModeMismatchError
from physics.geometry import ModelParams
from sampling.mcmc import McmcConfig

SCHEMA_VERSION = 1
_SECTIONS = ("model", "run", "mcmc", "simulation", "validate")
START_STATES = ("lattice", "degenerate", "aligned")


@dataclass(frozen=True)
class SimulationSettings:
    duration: float = 100.0
    observation_interval: Optional[float] = None
    bins: int = 128
    trajectory: bool = False
    event_log: bool = False
    start: str = "lattice"

    def interval(self) -> float:
        return self.observation_interval if self.observation_interval is not None else self.duration / 100_000


@dataclass(frozen=True)
class ValidateSettings:
    tolerance_scale: float = 1.0
    cases: Optional[Tuple[str, ...]] = None
    workers: Optional[int] = None
    slow: bool = False


@dataclass(frozen=True)
class RunConfig:
    model: ModelParams
    seed: Optional[int] = None
    out_dir: Path = Path("out")
    mode: ReflectionMode = ReflectionMode.LAMBERTIAN
    mcmc: McmcConfig = field(default_factory=McmcConfig)
    simulation: SimulationSettings = field(default_factory=SimulationSettings)
    validate: ValidateSettings = field(default_factory=ValidateSettings)
    source: Optional[Path] = None

    def require_seed(self) -> int:
        if self.seed is None:
            raise ConfigError("a seed is required for stochastic subcommands (set [run] seed or pass --seed)")
        return self.seed

    def with_overrides(
        self,
        *,
        seed: Optional[int] = None,
        out_dir: Optional[Path] = None,
        mode: Optional[str] = None,
        duration: Optional[float] = None,
        n: Optional[int] = None,
    ) -> "RunConfig":
        """Flag values win over file values; ``None`` leaves a value untouched."""

        updated = self
        if seed is not None:
            updated = replace(updated, seed=seed, mcmc=updated.mcmc.model_copy(update={"seed": seed}))
        if out_dir is not None:
            updated = replace(updated, out_dir=Path(out_dir))
        if mode is not None:
            try:
                updated = replace(updated, mode=ReflectionMode.parse(mode))
            except ModeMismatchError as exc:
                raise ConfigError(exc.message) from exc
        if duration is not None:
            if not duration > 0.0:
                raise ConfigError("duration must be positive")
            updated = replace(updated, simulation=replace(updated.simulation, duration=float(duration)))
        if n is not None:
            try:
                updated = replace(updated, model=ModelParams(**{**updated.model.model_dump(), "n": n}))
            except ValidationError as exc:
                raise ConfigError(f"invalid particle count: {exc}") from exc
        return updated

    def canonical(self) -> Dict[str, Any]:
        """Everything that influences results; the output directory is left out."""

        return {
            "schema_version": SCHEMA_VERSION,
            "model": self.model.model_dump(),
            "run": {"seed": self.seed, "mode": self.mode.value},
            "mcmc": self.mcmc.model_dump(),
            "simulation": {
                "duration": self.simulation.duration,
                "observation_interval": self.simulation.observation_interval,
                "bins": self.simulation.bins,
                "start": self.simulation.start,
            },
            "validate": {
                "tolerance_scale": self.validate.tolerance_scale,
                "cases": None if self.validate.cases is None else list(self.validate.cases),
                "slow": self.validate.slow,
            },
        }

    @property
    def config_hash(self) -> str:
        payload = json.dumps(self.canonical(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]


def _section(data: Dict[str, Any], name: str) -> Dict[str, Any]:
    section = data.get(name, {})
    if not isinstance(section, dict):
        raise ConfigError(f"[{name}] section must be a table")
    return section


def parse_run_config(data: Dict[str, Any], base_dir: Path, source: Optional[Path] = None) -> RunConfig:
    version = data.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema_version {version!r}; expected {SCHEMA_VERSION}")
    unknown = sorted(set(data) - set(_SECTIONS) - {"schema_version"})
    if unknown:
        raise ConfigError(f"unknown top-level keys: {', '.join(unknown)}")
    if "model" not in data:
        raise ConfigError("missing [model] section")

    run = _section(data, "run")
    sim = _section(data, "simulation")
    val = _section(data, "validate")

    def _to_int(value: object, name: str) -> Optional[int]:
        if value is None:
            return None
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{name} must be an integer")
        return value

    def _to_float(value: object, name: str) -> Optional[float]:
        if value is None:
            return None
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{name} must be a number")
        return float(value)

    def _to_bool(value: object, name: str, default: bool) -> bool:
        if value is None:
            return default
        if isinstance(value, bool):
            return value
        raise ConfigError(f"{name} accepts only true/false")

    def _to_path(value: object, name: str, default: Path) -> Path:
        if value is None:
            return default
        if not isinstance(value, str):
            raise ConfigError(f"{name} must be a string path")
        return (base_dir / value).resolve()

    def _to_cases(value: object) -> Optional[Tuple[str, ...]]:
        if value is None:
            return None
        if isinstance(value, str):
            value = [value]
        if not isinstance(value, list):
            raise ConfigError("validate.cases must be a string or an array of strings")
        cleaned = tuple(str(item).strip() for item in value if str(item).strip())
        return cleaned or None

    seed = _to_int(run.get("seed"), "run.seed")
    try:
        model = ModelParams(**_section(data, "model"))
        mcmc = McmcConfig(**{**_section(data, "mcmc"), **({"seed": seed} if seed is not None else {})})
    except ValidationError as exc:
        raise ConfigError(f"invalid configuration: {exc}") from exc

    try:
        mode = ReflectionMode.parse(run.get("mode", ReflectionMode.LAMBERTIAN.value))
    except ModeMismatchError as exc:
        raise ConfigError(exc.message) from exc

    duration = _to_float(sim.get("duration"), "simulation.duration")
    interval = _to_float(sim.get("observation_interval"), "simulation.observation_interval")
    bins = _to_int(sim.get("bins"), "simulation.bins")
    if duration is not None and duration <= 0.0:
        raise ConfigError("simulation.duration must be positive")
    if interval is not None and interval <= 0.0:
        raise ConfigError("simulation.observation_interval must be positive")
    if bins is not None and bins < 2:
        raise ConfigError("simulation.bins must be at least 2")
    start = sim.get("start", "lattice")
    if start not in START_STATES:
        raise ConfigError(f"simulation.start must be one of {', '.join(START_STATES)}, got {start!r}")
    simulation = SimulationSettings(
        duration=duration if duration is not None else SimulationSettings.duration,
        observation_interval=interval,
        bins=bins if bins is not None else SimulationSettings.bins,
        trajectory=_to_bool(sim.get("trajectory"), "simulation.trajectory", False),
        event_log=_to_bool(sim.get("event_log"), "simulation.event_log", False),
        start=start,
    )

    scale = _to_float(val.get("tolerance_scale"), "validate.tolerance_scale")
    if scale is not None and scale <= 0.0:
        raise ConfigError("validate.tolerance_scale must be positive")
    workers = _to_int(val.get("workers"), "validate.workers")
    validate = ValidateSettings(
        tolerance_scale=scale if scale is not None else 1.0,
        cases=_to_cases(val.get("cases")),
        workers=workers,
        slow=_to_bool(val.get("slow"), "validate.slow", False),
    )

    return RunConfig(
        model=model,
        seed=seed,
        out_dir=_to_path(run.get("out_dir"), "run.out_dir", (base_dir / "out").resolve()),
        mode=mode,
        mcmc=mcmc,
        simulation=simulation,
        validate=validate,
        source=source,
    )


def load_run_config(path: Path) -> RunConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        with path.open("rb") as fh:
            data = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    return parse_run_config(data, path.parent, source=path)


__all__ = [
    "RunConfig",
    "SCHEMA_VERSION",
    "START_STATES",
    "SimulationSettings",
    "ValidateSettings",
    "load_run_config",
    "parse_run_config",
]
