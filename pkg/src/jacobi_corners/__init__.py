"""Simulation and verification toolkit for general-beta Jacobi corners ensembles."""

from .errors import DomainError, NumericError
from .params import (
    CornersArray,
    EnsembleParams,
    ObservableSpec,
    elementary_symmetric,
    observable_value,
)
from .densities import (
    dixon_check,
    log_backward_density,
    log_forward_density,
    log_joint_density,
    log_level_density,
    log_selberg,
)
from .operators import (
    ExactScalar,
    OperatorChain,
    apply_operator_chain,
    covariance_e,
    covariance_p,
    expectation_e,
    expectation_p,
    h_ratio,
    pe_coefficients,
)
from .asymptotics import (
    ContourSpec,
    HatParams,
    LevelHeight,
    chebyshev_cov,
    chebyshev_cov_contour,
    f_limit,
    frozen_boundary,
    gff_cov,
    height_cov,
    level_contour,
    limit_covariance_p,
    monomial_in_chebyshev,
    omega,
    power_cov_via_chebyshev,
)
from .sampler import (
    ChainRun,
    ChainState,
    MomentEstimate,
    SamplerConfig,
    batch_mean_estimate,
    empirical_cumulants,
    empirical_shape,
    empirical_support,
    estimate_observables,
    gibbs_sweeps,
    init_corners,
    run_chain,
)
from .beta_infinity import (
    RootTarget,
    electrostatic_residual,
    esym_expectation_is_theta_free,
    esym_jacobian,
    esym_jacobian_solve,
    esym_values,
    fluctuation_samples,
    jacobi_roots,
    theta_scaled_cov_sequence,
)
from .hypergeom import (
    HOPoint,
    QuadSpec,
    calogero_residual,
    cauchy_check,
    eigen_check,
    ho_dual_eval,
    ho_eval,
    shift_coefficient,
)

__version__ = "0.1.0"

__all__ = [
    "DomainError",
    "NumericError",
    "CornersArray",
    "EnsembleParams",
    "ObservableSpec",
    "elementary_symmetric",
    "observable_value",
    "dixon_check",
    "log_backward_density",
    "log_forward_density",
    "log_joint_density",
    "log_level_density",
    "log_selberg",
    "ExactScalar",
    "OperatorChain",
    "apply_operator_chain",
    "covariance_e",
    "covariance_p",
    "expectation_e",
    "expectation_p",
    "h_ratio",
    "pe_coefficients",
    "ContourSpec",
    "HatParams",
    "LevelHeight",
    "chebyshev_cov",
    "chebyshev_cov_contour",
    "f_limit",
    "frozen_boundary",
    "gff_cov",
    "height_cov",
    "level_contour",
    "limit_covariance_p",
    "monomial_in_chebyshev",
    "omega",
    "power_cov_via_chebyshev",
    "ChainRun",
    "ChainState",
    "MomentEstimate",
    "SamplerConfig",
    "batch_mean_estimate",
    "empirical_cumulants",
    "empirical_shape",
    "empirical_support",
    "estimate_observables",
    "gibbs_sweeps",
    "init_corners",
    "run_chain",
    "RootTarget",
    "electrostatic_residual",
    "esym_expectation_is_theta_free",
    "esym_jacobian",
    "esym_jacobian_solve",
    "esym_values",
    "fluctuation_samples",
    "jacobi_roots",
    "theta_scaled_cov_sequence",
    "HOPoint",
    "QuadSpec",
    "calogero_residual",
    "cauchy_check",
    "eigen_check",
    "ho_dual_eval",
    "ho_eval",
    "shift_coefficient",
    "__version__",
]
