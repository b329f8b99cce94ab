"""Default acceptance cases.

Each case returns comparison rows; tolerances pass through
:meth:`CaseContext.tol` so ``--tolerance-scale`` loosens or tightens them
uniformly. Quick variants run in seconds to minutes, the full variants are
selected with ``[validate] slow = true``.
"""
from __future__ import annotations

import math
from typing import Iterator, List, Tuple

import numpy as np

from dynamics.reflection import ReflectionMode
from dynamics.simulator import Simulator, simulate
from dynamics.trace import apply_dense_event, dense_next_event
from errors import NoConvergenceError
from observables.ks import histogram_distance, histogram_ks_distance, ks_distance, uniformity_chi_square
from observables.marginals import predicted_height_marginal
from observables.mixing import two_start_mixing
from observables.reports import ComparisonRow, equipartition_report
from observables.summary import UNIFORMITY_BINS, ball_bin_edges, default_bin_edges, uniform_coordinate
from physics.equilibrium import (
    buoyancy_K,
    ball_height_density,
    floating_condition,
    lambda_star,
    predicted_kinetic_energy,
    psi_argmax,
    solve_archimedes,
    uniqueness_probe,
)
from physics.gas_analytics import (
    analytic_partials,
    gas_law_point,
    lambda_of_u,
    phase_volume_estimate,
    slab_volume_monte_carlo,
)
from physics.geometry import ModelParams
from sampling.exact import sample_velocities
from sampling.mcmc import ConditionalSlabSampler, McmcConfig, sample_microcanonical_chain
from sampling.state import degenerate_vertical_state, initial_state, potential_energy

from .registry import CaseContext, CaseRegistry

REGISTRY = CaseRegistry()

BOUND_GAMMA_RANGE = (1e-3, 1e3)
BOUND_HEIGHT_TOP = 50.0
LIGHT_BALL_MASS = 1e-6


def fixture_params(n: int = 200, **overrides: float) -> ModelParams:
    """Floating reference system used by the dynamic and sampling cases."""

    values = dict(d=2, rho_b=1.0, R=0.3, m=1.0, M=0.05, g=1.0, E=3.0, n=n)
    values.update(overrides)
    return ModelParams(**values)


def analytic_parameter_sets() -> List[ModelParams]:
    return [
        ModelParams(d=d, rho_b=1.0, R=R, m=1.0, M=0.1, g=1.0, E=2.0)
        for d in (2, 3)
        for R in (0.1, 0.3, 0.6)
    ]


def _random_points(
    rng: np.random.Generator,
    count: int,
    *,
    gamma_range: Tuple[float, float] = (0.05, 20.0),
    height_span: float = 5.0,
    min_clearance: float = 0.0,
) -> Iterator[Tuple[ModelParams, float, float]]:
    sets = analytic_parameter_sets()
    log_lo, log_hi = math.log(gamma_range[0]), math.log(gamma_range[1])
    for k in range(count):
        params = sets[k % len(sets)]
        gamma = math.exp(rng.uniform(log_lo, log_hi))
        y = params.R + min_clearance + rng.uniform(0.0, height_span)
        yield params, gamma, y


@REGISTRY.register("bounds", "Bound certificates on random gas-law points")
def check_bounds(ctx: CaseContext) -> List[ComparisonRow]:
    """Rates log-uniform over ``[1e-3, 1e3]/rho_b``, heights uniform over ``[R, 50·rho_b]``."""

    rng = np.random.default_rng(ctx.seed)
    count = ctx.pick(300, 1200)
    sets = analytic_parameter_sets()
    failing = 0
    for k in range(count):
        params = sets[k % len(sets)]
        gamma = math.exp(rng.uniform(math.log(BOUND_GAMMA_RANGE[0]), math.log(BOUND_GAMMA_RANGE[1]))) / params.rho_b
        y = rng.uniform(params.R, BOUND_HEIGHT_TOP * params.rho_b)
        if not gas_law_point(gamma, y, params).satisfies_bounds:
            failing += 1
    return [ComparisonRow.upper_bound("points violating a bound", failing, 0.5, note=f"{count} points")]


def _central(fn, x: float, h: float) -> float:
    return (fn(x + h) - fn(x - h)) / (2.0 * h)


@REGISTRY.register("derivatives", "Closed-form partials of lambda and q against central differences")
def check_derivatives(ctx: CaseContext) -> List[ComparisonRow]:
    rng = np.random.default_rng(ctx.seed + 1)
    count = ctx.pick(30, 150)
    worst = 0.0
    for params, gamma, y in _random_points(rng, count, gamma_range=(0.2, 5.0), height_span=1.5, min_clearance=0.05):
        u = gas_law_point(gamma, y, params).u
        lam = lambda_of_u(u, y, params)
        q = gas_law_point(lam, y, params).q
        exact = analytic_partials(u, y, params)
        hu, hy = 1e-4 * u, 1e-4 * y

        def q_at(uu: float, yy: float) -> float:
            return gas_law_point(lambda_of_u(uu, yy, params), yy, params).q

        numeric = {
            "dlam_du": (_central(lambda s: lambda_of_u(s, y, params), u, hu), lam / u),
            "dlam_dy": (_central(lambda s: lambda_of_u(u, s, params), y, hy), lam / u),
            "dq_du": (_central(lambda s: q_at(s, y), u, hu), q / u),
            "dq_dy": (_central(lambda s: q_at(u, s), y, hy), q / u),
        }
        for name, (value, scale) in numeric.items():
            analytic = getattr(exact, name)
            denom = max(abs(analytic), 1e-3 * scale)
            worst = max(worst, abs(analytic - value) / denom)
    return [ComparisonRow.upper_bound("worst relative partial error", worst, ctx.tol(1e-5), note=f"{count} points")]


@REGISTRY.register("inverse_map", "lambda_of_u inverts the mean height")
def check_inverse_map(ctx: CaseContext) -> List[ComparisonRow]:
    rng = np.random.default_rng(ctx.seed + 2)
    count = ctx.pick(60, 300)
    worst = 0.0
    for params, gamma, y in _random_points(rng, count):
        u = gas_law_point(gamma, y, params).u
        worst = max(worst, abs(lambda_of_u(u, y, params) - gamma) / gamma)
    return [ComparisonRow.upper_bound("worst relative inversion error", worst, ctx.tol(1e-10), note=f"{count} points")]


def random_floating_params(rng: np.random.Generator) -> ModelParams:
    for _ in range(100):
        d = int(rng.choice([2, 3]))
        R = float(rng.uniform(0.1, 0.5))
        E = float(rng.uniform(1.0, 4.0))
        light = ModelParams(d=d, rho_b=1.0, R=R, m=1.0, M=LIGHT_BALL_MASS, g=1.0, E=E)
        mass = float(rng.uniform(0.2, 0.8)) * buoyancy_K(lambda_star(light), R, light)
        for _ in range(20):
            params = ModelParams(**{**light.model_dump(), "M": mass})
            if floating_condition(params):
                return params
            mass *= 0.5
    raise NoConvergenceError("could not draw floating parameters")


@REGISTRY.register("archimedes_system", "Floating solutions, the psi peak and uniqueness")
def check_archimedes_system(ctx: CaseContext) -> List[ComparisonRow]:
    rng = np.random.default_rng(ctx.seed + 3)
    count = ctx.pick(5, 20)
    probe_points = ctx.pick(200, 1000)
    worst_residual = 0.0
    outside = 0
    worst_peak = 0.0
    not_unique = 0
    for _ in range(count):
        params = random_floating_params(rng)
        solution = solve_archimedes(params)
        worst_residual = max(worst_residual, abs(solution.residual_K), abs(solution.residual_G))
        if not params.R < solution.y_A < params.ceiling:
            outside += 1
        span = params.ceiling - params.R
        worst_peak = max(worst_peak, abs(psi_argmax(params) - solution.y_A) / span)
        if uniqueness_probe(params, probe_points) != 1:
            not_unique += 1
    return [
        ComparisonRow.upper_bound("worst K/G residual", worst_residual, ctx.tol(1e-9)),
        ComparisonRow.upper_bound("heights outside (R, E/Mg)", outside, 0.5),
        ComparisonRow.upper_bound("psi peak offset / span", worst_peak, ctx.tol(1e-6)),
        ComparisonRow.upper_bound("systems without a single crossing", not_unique, 0.5, note=f"{count} systems"),
    ]


@REGISTRY.register("no_ball", "Pure-gas reduction lambda = (d+2)mg/(2E)")
def check_no_ball(ctx: CaseContext) -> List[ComparisonRow]:
    rows = []
    for d in (2, 3):
        for E in (1.0, 2.5):
            params = ModelParams(d=d, rho_b=1.0, R=0.0, m=1.0, M=0.0, g=1.0, E=E)
            expected = (d + 2) * params.m * params.g / (2.0 * E)
            observed = solve_archimedes(params).lambda_A
            rows.append(ComparisonRow.relative(f"lambda d={d} E={E}", observed, expected, ctx.tol(1e-10)))
    return rows


@REGISTRY.register("phase_volume", "Leading-order slab volume against exact and Monte Carlo values")
def check_phase_volume(ctx: CaseContext) -> List[ComparisonRow]:
    simplex = ModelParams(d=2, rho_b=0.5, R=0.0, m=1.0, M=0.0, g=1.0, E=1.0)
    rows = [
        ComparisonRow.relative(
            "simplex n=3 u=1",
            phase_volume_estimate(3, 0.0, 1.0, simplex).value,
            math.sqrt(3.0) / 2.0,
            ctx.tol(0.35),
        )
    ]
    params = fixture_params(n=2)
    rng = np.random.default_rng(ctx.seed + 4)
    samples = ctx.pick(50_000, 400_000)
    ratios = []
    for n in range(2, 7):
        for u in (0.5, 1.0, 2.0):
            volume, _ = slab_volume_monte_carlo(n, 0.5, u, params, rng, samples=samples)
            estimate = phase_volume_estimate(n, 0.5, u, params).value
            ratios.append(estimate / volume if volume > 0.0 else math.inf)
    ratios = np.asarray(ratios)
    finite = ratios[np.isfinite(ratios)]
    spread = float(np.std(finite) / np.mean(finite)) if finite.size > 1 else math.inf
    rows.extend(
        [
            ComparisonRow.lower_bound("smallest estimate/MC ratio", float(ratios.min()), 0.05),
            ComparisonRow.upper_bound("largest estimate/MC ratio", float(ratios.max()), 20.0),
            ComparisonRow.upper_bound("ratio coefficient of variation", spread, ctx.tol(0.5)),
        ]
    )
    return rows


@REGISTRY.register("conservation", "Energy conservation and the invariant vertical orbit")
def check_conservation(ctx: CaseContext) -> List[ComparisonRow]:
    params = fixture_params(n=ctx.pick(50, 200))
    events = ctx.pick(20_000, 1_000_000)
    y_A = solve_archimedes(params).y_A
    rows = []
    for mode in (ReflectionMode.SPECULAR, ReflectionMode.LAMBERTIAN):
        rng = np.random.default_rng(ctx.seed)
        start = initial_state(params, rng, ball_height=y_A)
        result = Simulator(start, params, mode, rng).run_events(events)
        rows.append(
            ComparisonRow.upper_bound(
                f"energy drift ({mode.value})", result.telemetry.energy_drift, ctx.tol(1e-9), note=f"{events} events"
            )
        )

    rng = np.random.default_rng(ctx.seed)
    degenerate = degenerate_vertical_state(params, rng)
    result = Simulator(degenerate, params, ReflectionMode.SPECULAR).run_events(ctx.pick(5_000, 100_000))
    speed = result.telemetry.max_horizontal_speed
    rows.append(ComparisonRow("vertical orbit horizontal speed", speed, 0.0, 0.0, speed == 0.0))
    return rows


@REGISTRY.register("event_order", "Event-driven steps against the dense oracle")
def check_event_order(ctx: CaseContext) -> List[ComparisonRow]:
    params = fixture_params(n=3)
    rng = np.random.default_rng(ctx.seed)
    start = initial_state(params, rng, ball_height=solve_archimedes(params).y_A)
    simulator = Simulator(start, params, ReflectionMode.SPECULAR, check_queue=True)
    count = ctx.pick(300, 3000)
    mismatched = 0
    worst_time = 0.0
    worst_position = 0.0
    for _ in range(count):
        before = simulator.state
        event = simulator.step()
        dense = dense_next_event(before, params)
        if dense.kind is not event.kind or dense.index != event.index:
            mismatched += 1
            continue
        worst_time = max(worst_time, abs(dense.time - event.time))
        after = apply_dense_event(before, dense, params)
        worst_position = max(worst_position, float(np.max(np.abs(after.positions - simulator.state.positions))))
    return [
        ComparisonRow.upper_bound("events with a different kind or object", mismatched, 0.5, note=f"{count} events"),
        ComparisonRow.upper_bound("worst event time gap", worst_time, ctx.tol(1e-9)),
        ComparisonRow.upper_bound("worst position gap", worst_position, ctx.tol(1e-4)),
    ]


@REGISTRY.register("desk_archimedes", "Long simulation against the floating equilibrium")
def check_desk_archimedes(ctx: CaseContext) -> List[ComparisonRow]:
    params = fixture_params(n=ctx.pick(60, 200))
    duration = ctx.pick(300.0, 1500.0)
    slack = ctx.pick(2.0, 1.0)
    solution = solve_archimedes(params)
    rng = np.random.default_rng(ctx.seed)
    start = initial_state(params, rng, ball_height=solution.y_A)
    edges = default_bin_edges(params)
    summary = simulate(
        start,
        duration,
        ReflectionMode.LAMBERTIAN,
        rng,
        params=params,
        window_start=0.5 * duration,
        bin_edges=edges,
    )
    marginal = predicted_height_marginal(solution.lambda_A, solution.y_A, params)
    gas_ks = histogram_ks_distance(edges, summary.gas_counts, marginal.cdf, count=summary.gas_samples)
    particle_ke, _ = summary.particle_ke
    return [
        ComparisonRow.relative("mean ball height", summary.ball_height_mean, solution.y_A, ctx.tol(0.05 * slack)),
        ComparisonRow.upper_bound("gas height KS", gas_ks, ctx.tol(0.05 * slack)),
        ComparisonRow.relative(
            "particle kinetic energy",
            particle_ke,
            predicted_kinetic_energy(solution.lambda_A, params),
            ctx.tol(0.05 * slack),
        ),
    ]


@REGISTRY.register("ensemble_density", "Microcanonical ball height against the psi profile")
def check_ensemble_density(ctx: CaseContext) -> List[ComparisonRow]:
    n = ctx.pick(30, 100)
    params = fixture_params(n=n)
    cfg = McmcConfig(burn_in=ctx.pick(50_000, 400_000), samples=ctx.pick(2_000, 10_000), seed=ctx.seed)
    run = sample_microcanonical_chain(
        params, cfg, rng=np.random.default_rng(ctx.seed), ball_height=solve_archimedes(params).y_A
    )
    profile = ball_height_density(n, params)
    ks = ks_distance(run.ball_heights, profile.cdf)
    coordinate = uniform_coordinate(run.ball_horizontal, params.base.admissible_radius)
    counts = np.bincount(
        np.clip((coordinate * UNIFORMITY_BINS).astype(int), 0, UNIFORMITY_BINS - 1), minlength=UNIFORMITY_BINS
    )
    return [
        ComparisonRow.upper_bound("ball height KS", ks, ctx.tol(0.05), note=f"{len(run)} samples"),
        ComparisonRow.lower_bound("horizontal uniformity p-value", uniformity_chi_square(counts), 1e-3),
    ]


@REGISTRY.register("slab_convergence", "Slab chain heights against the predicted marginal")
def check_slab_convergence(ctx: CaseContext) -> List[ComparisonRow]:
    n = ctx.pick(60, 200)
    params = fixture_params(n=n)
    ball_y, u = 0.8, 1.0
    cfg = McmcConfig(burn_in=ctx.pick(50_000, 400_000), samples=ctx.pick(400, 2_000), seed=ctx.seed)
    sampler = ConditionalSlabSampler(np.zeros(params.d - 1), ball_y, u, n, params, cfg)
    run = sampler.run()
    marginal = predicted_height_marginal(sampler.lam, ball_y, params)
    ks = ks_distance(run.ys.ravel(), marginal.cdf)
    half = n // 2
    first, second = run.ys[:, 0 : 2 * half : 2], run.ys[:, 1 : 2 * half : 2]
    correlations = [float(np.corrcoef(first[:, k], second[:, k])[0, 1]) for k in range(half)]
    return [
        ComparisonRow.upper_bound("pooled height KS", ks, ctx.tol(0.05)),
        ComparisonRow.upper_bound("mean pair correlation", abs(float(np.mean(correlations))), ctx.tol(0.05)),
    ]


@REGISTRY.register("ergodicity", "Two-start mixing and the non-ergodic vertical orbit")
def check_ergodicity(ctx: CaseContext) -> List[ComparisonRow]:
    params = fixture_params(n=ctx.pick(30, 100))
    duration = ctx.pick(400.0, 3000.0)
    slack = ctx.pick(2.0, 1.0)
    solution = solve_archimedes(params)
    edges = ball_bin_edges(params)
    low = initial_state(params, np.random.default_rng(ctx.seed), ball_height=params.R + 0.25 * (solution.y_A - params.R))
    high = initial_state(params, np.random.default_rng(ctx.seed + 1), ball_height=solution.y_A + 4.0)
    mixing = two_start_mixing(params, low, high, duration, seeds=(ctx.seed, ctx.seed + 1), ball_edges=edges)

    rng = np.random.default_rng(ctx.seed + 2)
    degenerate = degenerate_vertical_state(params, rng)
    summaries = [
        simulate(state.copy(), duration, mode, np.random.default_rng(ctx.seed + 3), params=params,
                 window_start=0.5 * duration, ball_edges=edges)
        for state, mode in ((degenerate, ReflectionMode.SPECULAR), (low, ReflectionMode.LAMBERTIAN))
    ]
    separation = histogram_distance(edges, summaries[0].ball_occupation, summaries[1].ball_occupation)
    return [
        ComparisonRow.upper_bound("low/high start ball KS", mixing, ctx.tol(0.05 * slack)),
        ComparisonRow.lower_bound("vertical orbit vs Lambertian KS", separation, 0.5),
    ]


@REGISTRY.register("velocity_equipartition", "Exact velocity sampler shares kinetic energy equally")
def check_velocity_equipartition(ctx: CaseContext) -> List[ComparisonRow]:
    params = fixture_params(n=20)
    rng = np.random.default_rng(ctx.seed)
    state = initial_state(params, rng)
    pe = potential_energy(state.positions, params)
    draws = ctx.pick(4_000, 20_000)
    report = equipartition_report((sample_velocities(pe, params, rng) for _ in range(draws)), params)
    expected = (params.E - pe) / (params.n + 1)
    return [
        ComparisonRow.absolute(
            "particle kinetic energy", report.particle_ke, expected, 3.0 * report.particle_ke_stderr * ctx.tolerance_scale
        ),
        ComparisonRow.absolute(
            "ball kinetic energy", report.ball_ke, expected, 3.0 * report.ball_ke_stderr * ctx.tolerance_scale
        ),
    ]


__all__ = ["REGISTRY", "analytic_parameter_sets", "fixture_params", "random_floating_params"]
