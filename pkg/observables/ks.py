"""Distribution distances used by the acceptance checks."""
from __future__ import annotations

from typing import Callable

import numpy as np
from scipy import stats

from errors import InsufficientDataError, InvalidParameterError, OutOfRangeError

MIN_SAMPLES = 100
OVERFLOW_FRACTION = 1e-6

Cdf = Callable[[np.ndarray], np.ndarray]


def ks_distance(samples: np.ndarray, cdf: Cdf) -> float:
    """Kolmogorov–Smirnov distance between *samples* and the continuous *cdf*."""

    samples = np.asarray(samples, dtype=float).ravel()
    if samples.size < MIN_SAMPLES:
        raise InsufficientDataError(f"KS distance needs at least {MIN_SAMPLES} samples, got {samples.size}")
    return float(stats.kstest(samples, cdf).statistic)


def _empirical_at_edges(edges: np.ndarray, weights: np.ndarray) -> np.ndarray:
    weights = np.asarray(weights, dtype=float)
    if len(weights) not in (len(edges) - 1, len(edges)):
        raise InvalidParameterError("weights must have one entry per bin, optionally plus an overflow slot")
    total = float(weights.sum())
    if total <= 0.0:
        raise InsufficientDataError("histogram is empty")
    inner = weights[: len(edges) - 1]
    return np.concatenate([[0.0], np.cumsum(inner)]) / total


def histogram_ks_distance(edges: np.ndarray, weights: np.ndarray, cdf: Cdf, *, count: int) -> float:
    """KS distance of a binned (possibly time-weighted) sample, evaluated at the bin edges.

    *count* is the number of underlying observations and must reach 100.
    """

    if count < MIN_SAMPLES:
        raise InsufficientDataError(f"KS distance needs at least {MIN_SAMPLES} samples, got {count}")
    edges = np.asarray(edges, dtype=float)
    empirical = _empirical_at_edges(edges, weights)
    predicted = np.asarray(cdf(edges), dtype=float)
    return float(np.max(np.abs(empirical - predicted)))


def _overflow_fraction(edges: np.ndarray, weights: np.ndarray) -> float:
    weights = np.asarray(weights, dtype=float)
    if len(weights) != len(edges) or weights.sum() <= 0.0:
        return 0.0
    return float(weights[-1] / weights.sum())


def histogram_distance(edges: np.ndarray, first: np.ndarray, second: np.ndarray) -> float:
    """Sup-distance between the CDFs of two histograms on shared *edges*.

    Mass in an overflow slot has no position, so histograms with more than a
    negligible overflow fraction raise :class:`OutOfRangeError`.
    """

    edges = np.asarray(edges, dtype=float)
    for weights in (first, second):
        overflow = _overflow_fraction(edges, weights)
        if overflow > OVERFLOW_FRACTION:
            raise OutOfRangeError(
                f"{overflow:.1%} of the histogram lies above the last edge {float(edges[-1]):g}; widen the edges"
            )
    return float(np.max(np.abs(_empirical_at_edges(edges, first) - _empirical_at_edges(edges, second))))


def uniformity_chi_square(counts: np.ndarray) -> float:
    """p-value of the chi-square test that *counts* come from equally likely bins."""

    counts = np.asarray(counts, dtype=float)
    if counts.sum() < MIN_SAMPLES:
        raise InsufficientDataError(f"chi-square test needs at least {MIN_SAMPLES} samples")
    return float(stats.chisquare(counts).pvalue)


__all__ = [
    "MIN_SAMPLES",
    "OVERFLOW_FRACTION",
    "histogram_distance",
    "histogram_ks_distance",
    "ks_distance",
    "uniformity_chi_square",
]
