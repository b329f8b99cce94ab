"""Shared pytest fixtures for the gasball test suite."""
from __future__ import annotations

import textwrap
from pathlib import Path
from typing import Callable

import numpy as np
import pytest

from physics.geometry import ModelParams


@pytest.fixture
def floating_params() -> ModelParams:
    """A light ball that floats at y_A ≈ 1.08 in a two-dimensional container."""

    return ModelParams(d=2, rho_b=1.0, R=0.3, m=1.0, M=0.05, g=1.0, E=3.0, n=20)


@pytest.fixture
def floating_params_3d() -> ModelParams:
    return ModelParams(d=3, rho_b=1.0, R=0.3, m=1.0, M=0.01, g=1.0, E=3.0, n=20)


@pytest.fixture
def heavy_params() -> ModelParams:
    """A ball far too heavy to float."""

    return ModelParams(d=2, rho_b=1.0, R=0.3, m=1.0, M=5.0, g=1.0, E=3.0, n=20)


@pytest.fixture
def no_ball_params() -> ModelParams:
    return ModelParams(d=2, rho_b=1.0, R=0.0, m=1.0, M=0.0, g=1.0, E=2.0, n=20)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


@pytest.fixture
def write_config(tmp_path: Path) -> Callable[[str], Path]:
    """Write a TOML run configuration into ``tmp_path`` and return its path."""

    def factory(body: str, name: str = "run.toml") -> Path:
        path = tmp_path / name
        path.write_text(textwrap.dedent(body), encoding="utf-8")
        return path

    return factory
