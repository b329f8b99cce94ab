"""Ensemble samplers: microcanonical chain, limiting measure ν, mean-height slab."""
from .exact import draw_nu, sample_nu, sample_velocities
from .io import write_samples_csv
from .mcmc import (
    ChainDiagnostics,
    ConditionalSlabSampler,
    McmcConfig,
    MicrocanonicalRun,
    MicrocanonicalSampler,
    SlabRun,
    effective_sample_size,
    sample_conditional_slab,
    sample_microcanonical,
    sample_microcanonical_chain,
)
from .state import (
    SystemState,
    aligned_vertical_state,
    degenerate_vertical_state,
    initial_state,
    kinetic_energy,
    object_masses,
    potential_energy,
    state_violations,
    total_energy,
)

__all__ = [
    "ChainDiagnostics",
    "ConditionalSlabSampler",
    "McmcConfig",
    "MicrocanonicalRun",
    "MicrocanonicalSampler",
    "SlabRun",
    "SystemState",
    "aligned_vertical_state",
    "degenerate_vertical_state",
    "draw_nu",
    "effective_sample_size",
    "initial_state",
    "kinetic_energy",
    "object_masses",
    "potential_energy",
    "sample_conditional_slab",
    "sample_microcanonical",
    "sample_microcanonical_chain",
    "sample_nu",
    "sample_velocities",
    "state_violations",
    "total_energy",
    "write_samples_csv",
]
