"""Specification tests for parametric regressions.

Loss-function statistics (q_n and its null-variance variant) and a
generalized likelihood ratio, smoothed with Nadaraya-Watson product
kernels, calibrated asymptotically or by residual bootstrap, plus kernel
integral constants, Pitman efficiency analysis, simulation models, and a
Monte Carlo harness.
"""

__version__ = "0.1.0"

from .exceptions import (
    DataFormatError,
    DegenerateSampleError,
    LossSpecError,
    QuadratureError,
)
from .kernels import (
    FAMILIES,
    KernelConstants,
    KernelSpec,
    eval_kernel,
    eval_product_kernel,
    kernel_constants,
    parse_kernel,
    self_convolution,
)
from .loss import (
    LossSpec,
    LossValidation,
    linex_loss,
    loss_curvature,
    loss_eval,
    parse_loss,
    quadratic_loss,
    truncated_quadratic_loss,
    validate_loss,
)
from .smoothing import (
    Bandwidth,
    BandwidthRule,
    Sample,
    SmoothFit,
    cv_bandwidth,
    nw_fit,
    parse_bandwidth,
    parse_ratio,
    resolve_bandwidth,
    rot_bandwidth,
    scaled_coords,
    weight_matrix,
)
from .stats import (
    METHODS,
    NullFit,
    TestOutcome,
    TestSpec,
    asymptotic_calibration_glr,
    asymptotic_calibration_q,
    estimate_omega,
    f_statistic,
    glr_statistic,
    loss_statistic,
    ols_fit,
    parse_test,
    ssr_floor,
)
from .efficiency import (
    AREResult,
    Noncentrality,
    are_table,
    noncentrality_pair,
    pitman_are,
)
from .bootstrap import (
    BootstrapConfig,
    BootstrapOutcome,
    bootstrap_many,
    bootstrap_reject,
    conditional_bootstrap,
)
from .dgp import (
    DELTA_SHAPES,
    DGPSpec,
    ERROR_DISTS,
    MODELS,
    gen_errors,
    gen_regressor,
    gen_sample,
    parse_model,
)
from .harness import (
    CellResult,
    ExperimentConfig,
    MCReport,
    load_report,
    mc_standard_error,
    merge_reports,
    parse_config_text,
    persist_report,
    preset_config,
    run_experiment,
)
from ._backend import BACKEND

__all__ = [
    "__version__",
    "BACKEND",
    "LossSpecError",
    "DataFormatError",
    "DegenerateSampleError",
    "QuadratureError",
    "FAMILIES",
    "KernelSpec",
    "KernelConstants",
    "parse_kernel",
    "eval_kernel",
    "eval_product_kernel",
    "self_convolution",
    "kernel_constants",
    "LossSpec",
    "LossValidation",
    "parse_loss",
    "quadratic_loss",
    "truncated_quadratic_loss",
    "linex_loss",
    "loss_eval",
    "loss_curvature",
    "validate_loss",
    "Sample",
    "Bandwidth",
    "BandwidthRule",
    "SmoothFit",
    "parse_ratio",
    "parse_bandwidth",
    "scaled_coords",
    "nw_fit",
    "weight_matrix",
    "rot_bandwidth",
    "cv_bandwidth",
    "resolve_bandwidth",
    "METHODS",
    "NullFit",
    "TestSpec",
    "TestOutcome",
    "parse_test",
    "ols_fit",
    "ssr_floor",
    "loss_statistic",
    "glr_statistic",
    "f_statistic",
    "asymptotic_calibration_q",
    "asymptotic_calibration_glr",
    "estimate_omega",
    "AREResult",
    "Noncentrality",
    "pitman_are",
    "noncentrality_pair",
    "are_table",
    "BootstrapConfig",
    "BootstrapOutcome",
    "bootstrap_many",
    "conditional_bootstrap",
    "bootstrap_reject",
    "MODELS",
    "ERROR_DISTS",
    "DELTA_SHAPES",
    "DGPSpec",
    "parse_model",
    "gen_regressor",
    "gen_errors",
    "gen_sample",
    "ExperimentConfig",
    "CellResult",
    "MCReport",
    "mc_standard_error",
    "run_experiment",
    "persist_report",
    "load_report",
    "merge_reports",
    "parse_config_text",
    "preset_config",
]
