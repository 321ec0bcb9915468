"""Multiparameter estimation bounds for single- and two-mode pure Gaussian states.

Displacement and squeezing ``theta = (Re alpha, Im alpha, r)`` of
``D(alpha)S(r)|0>`` and of the displaced two-mode squeezed vacuum: SLD and
Holevo Cramer-Rao bounds, Uhlmann curvature, asymptotic incompatibility and
the Fisher information of general-dyne detection, with a truncated Fock-space
oracle for independent checks.
"""

from .estimation_bounds import (
    double_homodyne_fisher_two,
    double_homodyne_precision,
    gaussian_fisher,
    gendyne_fisher_single,
    gendyne_fisher_single_generic,
    gendyne_fisher_two,
    gendyne_precision_single,
    heterodyne_precision,
    qfi_matrix,
    quantumness,
    sld_crb,
    uhlmann_matrix,
)
from .gaussian_core import (
    GaussianDistribution,
    GaussianState,
    GendyneMeasurement,
    balanced_bs_symplectic,
    gendyne_distribution,
    single_mode_model_gaussian,
    squeezed_vacuum_cov,
    symplectic_form,
    two_mode_model_gaussian,
    validate_covariance,
)
from .hcrb import (
    ConvergenceError,
    MinimizerConfig,
    SubspaceFreeParams,
    gendyne_gap,
    h_value,
    hcrb_closed,
    minimize_h,
    optimal_gendyne,
    trace_norm_hermitian,
    z_matrix_single,
    z_matrix_two,
)
from .model import Model, ModelPoint
from .report import BoundsReport, bounds_report

__version__ = "0.1.0"
