"""Command-line interface: ``gasball solve | sample | simulate | validate``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict, replace
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np
from rich.console import Console
from rich.logging import RichHandler

from acceptance import CaseContext, exit_code, fixture_params, render_results, run_cases, write_results_csv
from artifacts import ArtifactHeader, write_csv
from config import RuntimeConfig, load_runtime_config
from dynamics.simulator import simulate
from dynamics.trace import EventLogRecorder, TrajectoryRecorder
from errors import EXIT_NOT_FLOATING, ConfigError, ErrorType, GasBallError, NotFloatingError
from observables.marginals import predicted_height_marginal
from observables.reports import (
    predicted_gas_fractions,
    render_report,
    simulation_report_rows,
    write_histogram_csv,
    write_summary_csv,
)
from observables.summary import ball_bin_edges, default_bin_edges
from physics.equilibrium import EquilibriumSolution, ball_height_density, solve_archimedes, solve_or_rest
from physics.geometry import ModelParams
from run_config import RunConfig, load_run_config
from sampling.io import write_samples_csv
from sampling.mcmc import sample_microcanonical_chain
from sampling.state import SystemState, aligned_vertical_state, degenerate_vertical_state, initial_state

logger = logging.getLogger("gasball")

Payload = Dict[str, Any]


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with the usage status rather than argparse's default 2."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(ErrorType.USAGE.exit_code)


def parse_args(argv: Optional[list[str]] = None) -> argparse.Namespace:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="Path to the TOML run configuration")
    common.add_argument("--seed", type=int, default=None, help="Random seed (overrides [run] seed)")
    common.add_argument("--out-dir", type=Path, default=None, help="Directory for CSV artifacts")
    common.add_argument("--mode", choices=["specular", "lambertian"], default=None, help="Wall reflection law")
    common.add_argument("--duration", type=float, default=None, help="Simulated time")
    common.add_argument("--n", type=int, default=None, help="Number of gas particles")
    common.add_argument("--json", action="store_true", help="Emit a machine-readable JSON summary")
    common.add_argument("--verbose", action="store_true", help="Log progress at debug level")

    parser = _Parser(prog="gasball", description="Gas-and-ball equilibrium solver, samplers and simulator")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    commands.add_parser("solve", parents=[common], help="Solve the floating equilibrium")
    commands.add_parser("sample", parents=[common], help="Draw microcanonical samples")
    commands.add_parser("simulate", parents=[common], help="Run the event-driven simulation")
    validate = commands.add_parser("validate", parents=[common], help="Run the acceptance suite")
    validate.add_argument("--case", action="append", dest="cases", help="Case id to run (repeatable)")
    validate.add_argument("--tolerance-scale", type=float, default=None, help="Multiply every tolerance")
    validate.add_argument("--workers", type=int, default=None, help="Worker processes for independent cases")
    slow_group = validate.add_mutually_exclusive_group()
    slow_group.add_argument(
        "--slow",
        dest="slow",
        action="store_const",
        const=True,
        help="Run the full desk-scale variants",
    )
    slow_group.add_argument(
        "--no-slow",
        dest="slow",
        action="store_const",
        const=False,
        help="Run the quick variants (default)",
    )
    validate.set_defaults(slow=None, cases=None, tolerance_scale=None, workers=None)
    return parser.parse_args(argv)


def configure_logging(verbose: bool, runtime: RuntimeConfig) -> None:
    level = logging.DEBUG if verbose else logging.getLevelName(runtime.log_level)
    logging.basicConfig(
        level=level,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=Console(stderr=True), show_path=False, rich_tracebacks=False)],
        force=True,
    )


def _coalesce_int(*values, fallback: int) -> int:
    for value in values:
        if value is not None:
            return int(value)
    return fallback


def _coalesce_bool(*values, fallback: bool) -> bool:
    for value in values:
        if value is not None:
            return bool(value)
    return fallback


def default_validate_config() -> RunConfig:
    return RunConfig(model=fixture_params(), seed=0, out_dir=Path("out").resolve())


def load_config(args: argparse.Namespace) -> RunConfig:
    if args.config is None:
        if args.command != "validate":
            raise ConfigError(f"--config is required for '{args.command}'")
        cfg = default_validate_config()
    else:
        cfg = load_run_config(args.config)
    cfg = cfg.with_overrides(seed=args.seed, out_dir=args.out_dir, mode=args.mode, duration=args.duration, n=args.n)
    if args.command == "validate":
        scale = args.tolerance_scale if args.tolerance_scale is not None else cfg.validate.tolerance_scale
        if not scale > 0.0:
            raise ConfigError("--tolerance-scale must be positive")
        cfg = replace(
            cfg,
            validate=replace(
                cfg.validate,
                tolerance_scale=float(scale),
                cases=tuple(args.cases) if args.cases else cfg.validate.cases,
                workers=args.workers if args.workers is not None else cfg.validate.workers,
                slow=_coalesce_bool(args.slow, cfg.validate.slow, fallback=False),
            ),
        )
    return cfg


def _header(cfg: RunConfig) -> ArtifactHeader:
    return ArtifactHeader(config_hash=cfg.config_hash, seed=cfg.seed)


def _floating_height(params: ModelParams) -> Optional[float]:
    if params.M <= 0.0:
        return None
    solution = solve_or_rest(params)
    return solution.y_A if solution.floating else None


def run_solve(cfg: RunConfig, args: argparse.Namespace, runtime: RuntimeConfig) -> Tuple[int, Payload]:
    params = cfg.model
    code = 0
    try:
        solution = solve_archimedes(params)
    except NotFloatingError as exc:
        logger.warning("%s; writing the resting solution", exc.message)
        solution = exc.resting
        code = EXIT_NOT_FLOATING

    header = _header(cfg)
    row = solution.as_row()
    files = [write_csv(cfg.out_dir / "equilibrium.csv", header, list(row), [list(row.values())])]
    profile_rows: List[list] = []
    if params.M > 0.0:
        profile = ball_height_density(params.n, params)
        profile_rows = [list(values) for values in zip(profile.y_grid, profile.log_psi, profile.density)]
    files.append(write_csv(cfg.out_dir / "psi_profile.csv", header, ["y", "log_psi", "density"], profile_rows))
    return code, {"command": "solve", "exit_code": code, "files": [str(f) for f in files], **row}


def run_sample(cfg: RunConfig, args: argparse.Namespace, runtime: RuntimeConfig) -> Tuple[int, Payload]:
    params = cfg.model
    seed = cfg.require_seed()
    run = sample_microcanonical_chain(
        params, cfg.mcmc, rng=np.random.default_rng(seed), ball_height=_floating_height(params)
    )
    header = _header(cfg)
    diagnostics = run.diagnostics.to_dict()
    flat: List[list] = [["steps", diagnostics["steps"]]]
    for key in ("proposals", "acceptance", "scales"):
        for block, value in sorted(diagnostics[key].items()):
            flat.append([f"{key}_{block}", value])
    flat.append(["effective_sample_size", diagnostics["effective_sample_size"]])
    files = [
        write_samples_csv(cfg.out_dir / "samples.csv", run, header),
        write_csv(cfg.out_dir / "diagnostics.csv", header, ["metric", "value"], flat),
    ]
    payload = {
        "command": "sample",
        "exit_code": 0,
        "samples": len(run),
        "diagnostics": diagnostics,
        "files": [str(f) for f in files],
    }
    return 0, payload


def starting_state(cfg: RunConfig, solution: EquilibriumSolution, rng: np.random.Generator) -> SystemState:
    params = cfg.model
    if cfg.simulation.start == "degenerate":
        return degenerate_vertical_state(params, rng)
    if cfg.simulation.start == "aligned":
        return aligned_vertical_state(params, rng)
    return initial_state(params, rng, ball_height=solution.y_A if solution.floating else None)


def run_simulate(cfg: RunConfig, args: argparse.Namespace, runtime: RuntimeConfig) -> Tuple[int, Payload]:
    params = cfg.model
    seed = cfg.require_seed()
    rng = np.random.default_rng(seed)
    solution = solve_or_rest(params)
    start = starting_state(cfg, solution, rng)
    header = _header(cfg)
    out = cfg.out_dir

    observers = []
    if cfg.simulation.trajectory:
        observers.append(TrajectoryRecorder(out / "trajectory.csv", header))
    if cfg.simulation.event_log:
        observers.append(EventLogRecorder(out / "events.csv", header))

    duration = cfg.simulation.duration
    edges = default_bin_edges(params, cfg.simulation.bins)
    summary = simulate(
        start,
        duration,
        cfg.mode,
        rng,
        observers,
        params=params,
        observation_interval=cfg.simulation.interval(),
        window_start=0.5 * duration,
        bin_edges=edges,
        ball_edges=ball_bin_edges(params, cfg.simulation.bins),
    )
    summary.seed = seed
    summary.config_hash = cfg.config_hash
    rows = simulation_report_rows(summary, params, solution)
    predicted = predicted_gas_fractions(predicted_height_marginal(solution.lambda_A, solution.y_A, params), edges)

    report = render_report(rows, title=f"gasball simulate ({cfg.mode.value}, seed {seed}, config {cfg.config_hash})")
    report_path = out / "report.txt"
    report_path.write_text(header.line() + "\n" + report, encoding="utf-8")
    files = [
        write_summary_csv(out / "summary.csv", summary, header),
        write_histogram_csv(out / "histogram.csv", summary, header, predicted),
        report_path,
    ]
    files.extend(observer.path for observer in observers)
    payload = {
        "command": "simulate",
        "exit_code": 0,
        "summary": summary.to_row(),
        "checks": [asdict(row) for row in rows],
        "all_passed": all(row.passed for row in rows),
        "report": report,
        "files": [str(f) for f in files],
    }
    return 0, payload


def run_validate(cfg: RunConfig, args: argparse.Namespace, runtime: RuntimeConfig) -> Tuple[int, Payload]:
    settings = cfg.validate
    ctx = CaseContext(tolerance_scale=settings.tolerance_scale, seed=cfg.seed or 0, full=settings.slow)
    workers = _coalesce_int(settings.workers, runtime.workers, fallback=1)
    results = run_cases(settings.cases, ctx, workers=workers)
    header = _header(cfg)
    report = render_results(results)
    report_path = cfg.out_dir / "report.txt"
    files = [write_results_csv(cfg.out_dir / "results.csv", results, header)]
    report_path.write_text(header.line() + "\n" + report, encoding="utf-8")
    files.append(report_path)
    code = exit_code(results)
    payload = {
        "command": "validate",
        "exit_code": code,
        "cases": {result.case_id: result.code for result in results},
        "report": report,
        "files": [str(f) for f in files],
    }
    return code, payload


COMMANDS: Dict[str, Callable[[RunConfig, argparse.Namespace, RuntimeConfig], Tuple[int, Payload]]] = {
    "solve": run_solve,
    "sample": run_sample,
    "simulate": run_simulate,
    "validate": run_validate,
}


def main(argv: Optional[list[str]] = None) -> int:
    args = parse_args(argv)
    runtime = load_runtime_config()
    configure_logging(args.verbose, runtime)

    try:
        cfg = load_config(args)
        code, payload = COMMANDS[args.command](cfg, args, runtime)
    except GasBallError as exc:
        logger.error("%s", exc.message)
        if args.json:
            print(_to_json({"command": args.command, "exit_code": exc.exit_code, "error": exc.message}))
        else:
            print(f"error: {exc.message}", file=sys.stderr)
        return exc.exit_code

    if args.json:
        print(_to_json(payload))
    else:
        _print_human_summary(payload)
    return code


def _json_default(value: object) -> object:
    if isinstance(value, (np.generic,)):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, Path):
        return str(value)
    raise TypeError(f"cannot serialise {type(value).__name__}")


def _to_json(payload: Payload) -> str:
    return json.dumps(payload, ensure_ascii=False, indent=2, default=_json_default)


def _print_human_summary(payload: Payload) -> None:
    command = payload["command"]
    if command == "solve":
        status = "floating" if payload["floating"] else "resting at the bottom"
        print(f"Ball {status}: y_A={payload['y_A']:.10g} lambda_A={payload['lambda_A']:.10g} u_A={payload['u_A']:.10g}")
        print(f"Residuals: K={payload['residual_K']:.3e} G={payload['residual_G']:.3e}")
    elif command == "sample":
        diagnostics = payload["diagnostics"]
        print(f"Samples: {payload['samples']} after {diagnostics['steps']} steps")
        for block, rate in sorted(diagnostics["acceptance"].items()):
            print(f"  - {block} acceptance {rate:.3f}")
    else:
        print(payload["report"], end="")

    print("Files written:")
    for path in payload["files"]:
        print(f"  - {path}")


if __name__ == "__main__":
    raise SystemExit(main())
