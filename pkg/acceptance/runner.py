"""Run acceptance cases, optionally in a process pool, and report the results."""
from __future__ import annotations

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Tuple

from artifacts import ArtifactHeader, write_csv
from errors import ConfigError, GasBallError
from observables.reports import ComparisonRow, render_report

from .cases import REGISTRY
from .registry import CODE_ERROR, CODE_FAILED, CODE_PASSED, CaseContext, CaseResult

logger = logging.getLogger(__name__)

RESULT_COLUMNS = ["case", "check", "observed", "predicted", "tolerance", "passed", "code", "note"]


def run_case(case_id: str, ctx: CaseContext) -> CaseResult:
    """Run one case; library errors and numerical failures become an errored result."""

    case = REGISTRY.get(case_id)
    started = time.perf_counter()
    result = CaseResult(case_id=case_id, title=case.title)
    try:
        result.rows = list(case.run(ctx))
    except GasBallError as exc:
        result.error = f"{type(exc).__name__}: {exc.message}"
    except (ArithmeticError, ValueError, RuntimeError) as exc:
        result.error = f"{type(exc).__name__}: {exc}"
    result.seconds = time.perf_counter() - started
    if result.error is not None:
        logger.error("case %s errored after %.1fs: %s", case_id, result.seconds, result.error)
    else:
        logger.info("case %s %s in %.1fs", case_id, "passed" if result.passed else "FAILED", result.seconds)
    return result


def _run_job(job: Tuple[str, CaseContext]) -> CaseResult:
    return run_case(*job)


def resolve_case_ids(requested: Optional[Iterable[str]]) -> List[str]:
    if requested is None:
        return REGISTRY.ids()
    ids = sorted(set(requested))
    unknown = [case_id for case_id in ids if case_id not in REGISTRY]
    if unknown:
        raise ConfigError(f"unknown acceptance cases: {', '.join(unknown)} (known: {', '.join(REGISTRY.ids())})")
    return ids


def run_cases(
    case_ids: Optional[Iterable[str]],
    ctx: CaseContext,
    *,
    workers: int = 1,
) -> List[CaseResult]:
    """Results ordered by case id regardless of completion order."""

    ids = resolve_case_ids(case_ids)
    jobs = [(case_id, ctx) for case_id in ids]
    if workers <= 1 or len(jobs) <= 1:
        results = [_run_job(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_job, jobs))
    return sorted(results, key=lambda result: result.case_id)


def exit_code(results: Sequence[CaseResult]) -> int:
    codes = {result.code for result in results}
    if CODE_ERROR in codes:
        return CODE_ERROR
    if CODE_FAILED in codes:
        return CODE_FAILED
    return CODE_PASSED


def write_results_csv(path: Path, results: Sequence[CaseResult], header: ArtifactHeader) -> Path:
    rows = []
    for result in results:
        if result.error is not None:
            rows.append([result.case_id, "error", "", "", "", False, result.code, result.error])
            continue
        for row in result.rows:
            rows.append(
                [result.case_id, row.name, row.observed, row.predicted, row.tolerance, row.passed, result.code, row.note]
            )
    return write_csv(path, header, RESULT_COLUMNS, rows)


def render_results(results: Sequence[CaseResult]) -> str:
    rows: List[ComparisonRow] = []
    for result in results:
        if result.error is not None:
            rows.append(ComparisonRow(f"{result.case_id}: error", float("nan"), float("nan"), float("nan"), False, result.error))
            continue
        for row in result.rows:
            rows.append(ComparisonRow(f"{result.case_id}: {row.name}", row.observed, row.predicted, row.tolerance, row.passed, row.note))
    passed = sum(result.passed for result in results)
    return render_report(rows, title=f"Acceptance ({passed}/{len(results)} cases passed)")


__all__ = [
    "RESULT_COLUMNS",
    "exit_code",
    "render_results",
    "resolve_case_ids",
    "run_case",
    "run_cases",
    "write_results_csv",
]
