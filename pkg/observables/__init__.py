"""Observables computed from sampler and simulator streams.

``observables.mixing`` drives the simulator and is imported on its own.
"""
from .ks import histogram_distance, histogram_ks_distance, ks_distance, uniformity_chi_square
from .marginals import PredictedMarginal, predicted_height_marginal
from .reports import (
    ComparisonRow,
    EquipartitionReport,
    equipartition_report,
    predicted_gas_fractions,
    render_report,
    simulation_report_rows,
    summary_equipartition,
    write_histogram_csv,
    write_summary_csv,
)
from .summary import (
    EmpiricalSummary,
    SummaryObserver,
    ball_bin_edges,
    default_bin_edges,
    parabola_occupation,
    uniform_coordinate,
)

__all__ = [
    "ComparisonRow",
    "EmpiricalSummary",
    "EquipartitionReport",
    "PredictedMarginal",
    "SummaryObserver",
    "ball_bin_edges",
    "default_bin_edges",
    "equipartition_report",
    "histogram_distance",
    "histogram_ks_distance",
    "ks_distance",
    "parabola_occupation",
    "predicted_gas_fractions",
    "predicted_height_marginal",
    "render_report",
    "simulation_report_rows",
    "summary_equipartition",
    "uniform_coordinate",
    "uniformity_chi_square",
    "write_histogram_csv",
    "write_summary_csv",
]
