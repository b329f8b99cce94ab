"""Analytic side of the gas-and-ball model: geometry, gas integrals, equilibrium."""
from .geometry import (
    BaseRegion,
    ModelParams,
    admissible_mask,
    ball_slice_area,
    ball_volume,
    is_admissible_particle,
    unit_ball_volume,
)
from .gas_analytics import (
    AnalyticPartials,
    GasLawPoint,
    LogValue,
    analytic_partials,
    exact_slab_volume,
    gas_law_point,
    h_n,
    h_n_partial_gamma,
    h_n_partial_y,
    lambda_of_u,
    log_slab_volume_all_centers,
    pel_identity_check,
    phase_volume_estimate,
    slab_volume_monte_carlo,
)
from .equilibrium import (
    EquilibriumSolution,
    HeightProfile,
    ball_height_density,
    beta_y,
    buoyancy_K,
    concentration_mass,
    energy_G,
    floating_condition,
    kappa_y,
    lambda_star,
    mass_scan,
    predicted_kinetic_energy,
    psi_argmax,
    psi_of_y,
    psi_slope_sign,
    resting_solution,
    solve_archimedes,
    solve_lambda_given_y,
    solve_or_rest,
    u0_of_y,
    uniqueness_probe,
    z_of_y,
)

__all__ = [
    "AnalyticPartials",
    "BaseRegion",
    "EquilibriumSolution",
    "GasLawPoint",
    "HeightProfile",
    "LogValue",
    "ModelParams",
    "admissible_mask",
    "analytic_partials",
    "ball_height_density",
    "ball_slice_area",
    "ball_volume",
    "beta_y",
    "buoyancy_K",
    "concentration_mass",
    "energy_G",
    "exact_slab_volume",
    "floating_condition",
    "gas_law_point",
    "h_n",
    "h_n_partial_gamma",
    "h_n_partial_y",
    "is_admissible_particle",
    "kappa_y",
    "lambda_of_u",
    "lambda_star",
    "log_slab_volume_all_centers",
    "mass_scan",
    "pel_identity_check",
    "phase_volume_estimate",
    "predicted_kinetic_energy",
    "psi_argmax",
    "psi_of_y",
    "psi_slope_sign",
    "resting_solution",
    "slab_volume_monte_carlo",
    "solve_archimedes",
    "solve_lambda_given_y",
    "solve_or_rest",
    "u0_of_y",
    "uniqueness_probe",
    "unit_ball_volume",
    "z_of_y",
]
