"""Registry of acceptance cases run by ``gasball validate``."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

from observables.reports import ComparisonRow

logger = logging.getLogger(__name__)

CODE_PASSED = 0
CODE_ERROR = 2
CODE_FAILED = 3


@dataclass(frozen=True)
class CaseContext:
    """Knobs shared by every case: tolerance multiplier, seed and scale."""

    tolerance_scale: float = 1.0
    seed: int = 0
    full: bool = False

    def tol(self, value: float) -> float:
        return value * self.tolerance_scale

    def pick(self, quick, full):
        return full if self.full else quick


@dataclass
class CaseResult:
    case_id: str
    title: str
    rows: List[ComparisonRow] = field(default_factory=list)
    error: Optional[str] = None
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return self.error is None and all(row.passed for row in self.rows)

    @property
    def code(self) -> int:
        if self.error is not None:
            return CODE_ERROR
        return CODE_PASSED if self.passed else CODE_FAILED


CaseFn = Callable[[CaseContext], List[ComparisonRow]]


@dataclass(frozen=True)
class AcceptanceCase:
    case_id: str
    title: str
    run: CaseFn


class CaseRegistry:
    """Maps case ids to their check functions."""

    def __init__(self) -> None:
        self._cases: Dict[str, AcceptanceCase] = {}

    def register(self, case_id: str, title: str) -> Callable[[CaseFn], CaseFn]:
        def decorator(fn: CaseFn) -> CaseFn:
            if case_id in self._cases:
                logger.warning("overwriting acceptance case '%s'", case_id)
            self._cases[case_id] = AcceptanceCase(case_id=case_id, title=title, run=fn)
            return fn

        return decorator

    def get(self, case_id: str) -> AcceptanceCase:
        try:
            return self._cases[case_id]
        except KeyError as exc:
            raise KeyError(f"unknown acceptance case '{case_id}'") from exc

    def ids(self) -> List[str]:
        return sorted(self._cases)

    def __contains__(self, case_id: str) -> bool:
        return case_id in self._cases


__all__ = [
    "AcceptanceCase",
    "CODE_ERROR",
    "CODE_FAILED",
    "CODE_PASSED",
    "CaseContext",
    "CaseRegistry",
    "CaseResult",
]
