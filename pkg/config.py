"""Process-level runtime settings read from the environment."""
from __future__ import annotations

import logging
import os
from dataclasses import dataclass
from typing import Optional

VERSION = "0.1.0"
DEFAULT_LOG_LEVEL = "WARNING"
DEFAULT_WORKERS = 1


@dataclass(frozen=True)
class RuntimeConfig:
    """Settings that affect how a run executes but never what it computes."""

    log_level: str
    workers: int


def _parse_positive_int(raw: Optional[str], fallback: int) -> int:
    """Return a positive integer parsed from *raw*, or *fallback* on failure."""

    if raw is None:
        return fallback
    try:
        value = int(raw)
    except (TypeError, ValueError):
        return fallback
    return value if value > 0 else fallback


def _parse_log_level(raw: Optional[str], fallback: str) -> str:
    level = (raw or "").strip().upper()
    if level and isinstance(logging.getLevelName(level), int):
        return level
    return fallback


def load_runtime_config() -> RuntimeConfig:
    """Load runtime settings from environment variables with safe fallbacks."""

    log_level = _parse_log_level(os.getenv("GASBALL_LOG_LEVEL"), DEFAULT_LOG_LEVEL)
    workers = _parse_positive_int(os.getenv("GASBALL_WORKERS"), DEFAULT_WORKERS)
    return RuntimeConfig(log_level=log_level, workers=workers)


__all__ = ["DEFAULT_LOG_LEVEL", "DEFAULT_WORKERS", "RuntimeConfig", "VERSION", "load_runtime_config"]
