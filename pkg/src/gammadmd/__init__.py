"""Modal decomposition of time series robust to multiplicative gamma noise.

The package pairs a baseline variable-projection fit of exponentials (for
additive noise) with a penalised model whose data term matches unit-mean
gamma multiplicative corruption, solved by alternating projected gradient
descent.  Data generators, noise sources, metrics and a Monte-Carlo harness
reproduce the reference experiments at desk scale.
"""

from .bench import ExperimentPlan, TrialStats, metric_d, recon_error, run_combustor_study, run_trials
from .errors import (
    DegenerateSpectrumError,
    DegenerateSpectrumWarning,
    FidelitySingularityError,
    GammaDmdError,
    ShapeError,
    SimulationDivergedError,
)
from .model import (
    ModelConfig,
    SnapshotSet,
    SolveResult,
    SolveTrace,
    amplitudes,
    build_phi,
    energy,
    energy_shifted,
    project_sign_cone,
    reconstruct,
)
from .noise import NoiseSpec, apply_multiplicative, pink_noise, sample_gamma_unit_mean
from .solver import (
    IterateState,
    alternating_descent,
    descend_alpha,
    descend_h,
    fd_init,
    full_solve,
    grad_alpha,
    grad_h,
)
from .systems import (
    CombustorConfig,
    HiddenConfig,
    PeriodicConfig,
    gen_hidden,
    gen_periodic,
    segment_snapshots,
    simulate_combustor,
)
from .varpro import LmConfig, LmResult, lm_solve, varpro_jacobian, varpro_residual

__version__ = "0.1.0"

__all__ = [
    "CombustorConfig",
    "DegenerateSpectrumError",
    "DegenerateSpectrumWarning",
    "ExperimentPlan",
    "FidelitySingularityError",
    "GammaDmdError",
    "HiddenConfig",
    "IterateState",
    "LmConfig",
    "LmResult",
    "ModelConfig",
    "NoiseSpec",
    "PeriodicConfig",
    "ShapeError",
    "SimulationDivergedError",
    "SnapshotSet",
    "SolveResult",
    "SolveTrace",
    "TrialStats",
    "alternating_descent",
    "amplitudes",
    "apply_multiplicative",
    "build_phi",
    "descend_alpha",
    "descend_h",
    "energy",
    "energy_shifted",
    "fd_init",
    "full_solve",
    "gen_hidden",
    "gen_periodic",
    "grad_alpha",
    "grad_h",
    "lm_solve",
    "metric_d",
    "pink_noise",
    "project_sign_cone",
    "recon_error",
    "reconstruct",
    "run_combustor_study",
    "run_trials",
    "sample_gamma_unit_mean",
    "segment_snapshots",
    "simulate_combustor",
    "varpro_jacobian",
    "varpro_residual",
]
