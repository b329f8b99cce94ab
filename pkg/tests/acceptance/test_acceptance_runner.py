import math

import numpy as np
import pytest

from acceptance import REGISTRY, fixture_params
from acceptance import runner as runner_module
from acceptance.cases import analytic_parameter_sets, random_floating_params
from acceptance.registry import CODE_ERROR, CODE_FAILED, CODE_PASSED, CaseContext, CaseRegistry, CaseResult
from acceptance.runner import (
    RESULT_COLUMNS,
    exit_code,
    render_results,
    resolve_case_ids,
    run_case,
    run_cases,
    write_results_csv,
)
from artifacts import ArtifactHeader, read_csv
from errors import ConfigError, NoConvergenceError
from observables.reports import ComparisonRow
from physics.equilibrium import floating_condition

EXPECTED_CASES = {
    "archimedes_system",
    "bounds",
    "conservation",
    "derivatives",
    "desk_archimedes",
    "ensemble_density",
    "ergodicity",
    "event_order",
    "inverse_map",
    "no_ball",
    "phase_volume",
    "slab_convergence",
    "velocity_equipartition",
}


@pytest.fixture
def fake_registry(monkeypatch):
    registry = CaseRegistry()

    @registry.register("fine", "always passes")
    def fine(ctx):
        return [ComparisonRow.upper_bound("value", 0.0, ctx.tol(1.0))]

    @registry.register("tight", "fails unless loosened")
    def tight(ctx):
        return [ComparisonRow.upper_bound("value", 0.5, ctx.tol(0.1))]

    @registry.register("broken", "raises a library error")
    def broken(ctx):
        raise NoConvergenceError("solver gave up")

    @registry.register("overflow", "raises an arithmetic error")
    def overflow(ctx):
        raise ZeroDivisionError("division by zero")

    monkeypatch.setattr(runner_module, "REGISTRY", registry)
    return registry


def test_default_registry_lists_every_case():
    assert set(REGISTRY.ids()) == EXPECTED_CASES
    assert REGISTRY.ids() == sorted(REGISTRY.ids())
    with pytest.raises(KeyError):
        REGISTRY.get("missing")


def test_registering_twice_overwrites(caplog):
    registry = CaseRegistry()
    registry.register("a", "first")(lambda ctx: [])
    registry.register("a", "second")(lambda ctx: [])
    assert registry.get("a").title == "second"
    assert "overwriting" in caplog.text


def test_context_scales_and_picks():
    ctx = CaseContext(tolerance_scale=2.0)
    assert ctx.tol(0.05) == pytest.approx(0.1)
    assert ctx.pick(1, 2) == 1
    assert CaseContext(full=True).pick(1, 2) == 2


def test_run_case_captures_errors(fake_registry):
    ctx = CaseContext()
    assert run_case("fine", ctx).code == CODE_PASSED
    assert run_case("tight", ctx).code == CODE_FAILED
    assert run_case("tight", CaseContext(tolerance_scale=10.0)).code == CODE_PASSED
    broken = run_case("broken", ctx)
    assert broken.code == CODE_ERROR
    assert broken.error == "NoConvergenceError: solver gave up"
    assert run_case("overflow", ctx).error.startswith("ZeroDivisionError")


def test_exit_code_is_the_worst_result(fake_registry):
    results = run_cases(["fine", "tight"], CaseContext())
    assert [result.case_id for result in results] == ["fine", "tight"]
    assert exit_code(results) == CODE_FAILED
    assert exit_code(run_cases(None, CaseContext())) == CODE_ERROR
    assert exit_code([CaseResult("x", "x")]) == CODE_PASSED


def test_unknown_case_ids_are_a_usage_error(fake_registry):
    with pytest.raises(ConfigError) as excinfo:
        resolve_case_ids(["fine", "nope"])
    assert excinfo.value.exit_code == 1
    assert resolve_case_ids(["tight", "fine", "fine"]) == ["fine", "tight"]


def test_results_csv_and_rendering(tmp_path, fake_registry):
    results = run_cases(None, CaseContext())
    header = ArtifactHeader(config_hash="feedfacefeedface", seed=0)
    write_results_csv(tmp_path / "results.csv", results, header)
    line, columns, rows = read_csv(tmp_path / "results.csv")
    assert line == header.line()
    assert columns == RESULT_COLUMNS
    by_case = {row[0]: row for row in rows}
    assert by_case["broken"][1] == "error"
    assert by_case["broken"][6] == str(CODE_ERROR)
    assert by_case["fine"][5] == "1"
    text = render_results(results)
    assert "Acceptance (1/4 cases passed)" in text
    assert "broken: error" in text


def test_reference_systems():
    params = fixture_params()
    assert params.n == 200
    assert floating_condition(fixture_params(n=5))
    assert fixture_params(n=3, d=3).d == 3
    sets = analytic_parameter_sets()
    assert len(sets) == 6
    assert {p.d for p in sets} == {2, 3}


def test_random_floating_params_float():
    rng = np.random.default_rng(0)
    for _ in range(3):
        params = random_floating_params(rng)
        assert floating_condition(params)
        assert params.M > 0.0
        assert not math.isinf(params.ceiling)


@pytest.mark.parametrize("case_id", ["bounds", "no_ball", "inverse_map", "velocity_equipartition"])
def test_quick_cases_pass(case_id):
    result = run_case(case_id, CaseContext())
    assert result.error is None
    assert result.passed, result.rows


def test_tiny_tolerance_fails_equipartition():
    result = run_case("velocity_equipartition", CaseContext(tolerance_scale=1e-9))
    assert result.code == CODE_FAILED


@pytest.mark.slow
@pytest.mark.parametrize("case_id", sorted(EXPECTED_CASES))
def test_acceptance_case(case_id):
    result = run_case(case_id, CaseContext())
    assert result.error is None, result.error
    assert result.passed, result.rows
