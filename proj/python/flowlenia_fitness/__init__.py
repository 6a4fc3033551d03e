"""Flow Lenia simulation, multi-scale compression complexity and evolution."""

from ._core import (
    __version__,
    compression_complexity,
    complexity_profile,
    default_config,
    encoder_info,
    evolve,
    fitness,
    init_state,
    load_genome,
    mass_center,
    polar_resample,
    run_experiment,
    sample_genome,
    simulate,
    state_image,
)

__all__ = [
    "__version__",
    "compression_complexity",
    "complexity_profile",
    "default_config",
    "encoder_info",
    "evolve",
    "fitness",
    "init_state",
    "load_genome",
    "mass_center",
    "polar_resample",
    "run_experiment",
    "sample_genome",
    "simulate",
    "state_image",
]
