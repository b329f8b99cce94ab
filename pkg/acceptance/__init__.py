"""Acceptance cases behind ``gasball validate``."""
from .cases import REGISTRY, fixture_params
from .registry import CODE_ERROR, CODE_FAILED, CODE_PASSED, AcceptanceCase, CaseContext, CaseRegistry, CaseResult
from .runner import exit_code, render_results, resolve_case_ids, run_case, run_cases, write_results_csv

__all__ = [
    "AcceptanceCase",
    "CODE_ERROR",
    "CODE_FAILED",
    "CODE_PASSED",
    "CaseContext",
    "CaseRegistry",
    "CaseResult",
    "REGISTRY",
    "exit_code",
    "fixture_params",
    "render_results",
    "resolve_case_ids",
    "run_case",
    "run_cases",
    "write_results_csv",
]
