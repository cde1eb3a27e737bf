"""Robust subspace recovery by geometric lp minimization over the
Grassmannian: energy and derivatives, local-minimum certificates, a
spherically symmetric mixture sampler, closed-form theory constants, a
multi-start geodesic optimizer with an exhaustive planar oracle, and a
Monte Carlo experiment harness.
"""

from .bounds import (
    ConstantsReport,
    InlierDistribution,
    constants_report,
    delta_star,
    energy_gap_lower_bound,
    eps_upper,
    kappa_delta_general,
    kappa_delta_lower_bound,
    psi,
    stability_radius,
    two_line_mean_tilt_norm,
    xi1,
)
from .certificates import (
    CertificateResult,
    Verdict,
    certify_l1,
    certify_p_less_1,
    check_necessary_p_gt_1,
    default_margin_tol,
)
from .energy import (
    Dataset,
    OutlyingCorrelation,
    d_matrix,
    energy,
    frame_matrices,
    geodesic_derivative,
    geodesic_derivative_tp,
    nuclear_norm,
    on_subspace_mask,
    outlying_correlation,
)
from .estimator import LpSubspace
from .exceptions import (
    ConfigError,
    DegenerateData,
    DimensionError,
    GeodesicNotUnique,
    LpSubspaceError,
    NonDifferentiable,
    ParameterError,
    SingularPointError,
)
from .experiments import (
    ExperimentSpec,
    TrialRecord,
    run_experiment,
    trial_seed,
    wilson_interval,
    write_records_csv,
)
from .grassmann import (
    PrincipalDecomposition,
    Subspace,
    geodesic_distance,
    geodesic_point,
    orthonormalize,
    point_distance,
    point_distances,
    principal_angles,
    principal_decomposition,
    project,
    random_subspace,
)
from .model import (
    ComponentConfig,
    HlmModelConfig,
    OutlierConfig,
    sample,
    sample_weakly_symmetric,
)
from .optimize import (
    OptimizationResult,
    OptimizerConfig,
    grid_oracle,
    minimize,
)

__all__ = [
    "CertificateResult",
    "ComponentConfig",
    "ConfigError",
    "ConstantsReport",
    "Dataset",
    "DegenerateData",
    "DimensionError",
    "ExperimentSpec",
    "GeodesicNotUnique",
    "HlmModelConfig",
    "InlierDistribution",
    "LpSubspace",
    "LpSubspaceError",
    "NonDifferentiable",
    "OptimizationResult",
    "OptimizerConfig",
    "OutlierConfig",
    "OutlyingCorrelation",
    "ParameterError",
    "PrincipalDecomposition",
    "SingularPointError",
    "Subspace",
    "TrialRecord",
    "Verdict",
    "certify_l1",
    "certify_p_less_1",
    "check_necessary_p_gt_1",
    "constants_report",
    "d_matrix",
    "default_margin_tol",
    "delta_star",
    "energy",
    "energy_gap_lower_bound",
    "eps_upper",
    "frame_matrices",
    "geodesic_derivative",
    "geodesic_derivative_tp",
    "geodesic_distance",
    "geodesic_point",
    "grid_oracle",
    "kappa_delta_general",
    "kappa_delta_lower_bound",
    "minimize",
    "nuclear_norm",
    "on_subspace_mask",
    "orthonormalize",
    "outlying_correlation",
    "point_distance",
    "point_distances",
    "principal_angles",
    "principal_decomposition",
    "project",
    "psi",
    "random_subspace",
    "run_experiment",
    "sample",
    "sample_weakly_symmetric",
    "stability_radius",
    "trial_seed",
    "two_line_mean_tilt_norm",
    "wilson_interval",
    "write_records_csv",
    "xi1",
]

__version__ = "0.1.0"
