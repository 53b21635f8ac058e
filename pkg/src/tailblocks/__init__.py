"""Heavy-tail inference from block partition functions.

Core workflow: build a (q, s) grid of log partition-function ratios from a
sample, regress on the block exponent to get the empirical scaling
function, and fit that curve to its closed-form limit to estimate the tail
index. Hill, moment and QQ order-statistics tools plus seeded simulators
for the reference processes round out the toolkit.
"""

from .errors import DataError, EstimationError
from .estimators import (
    EstimatorTrace,
    MomentEstimate,
    TailEstimate,
    estimator_trace,
    fit_tail_index,
    hill_estimate,
    model_gt2,
    model_le2,
    moment_estimate,
    qq_points,
)
from .partition import (
    PartitionGrid,
    block_length,
    blocks_used,
    build_partition_grid,
    partition_function,
)
from .scaling import (
    MIN_BLOCKS_DEFAULT,
    RateParams,
    ScalingCurve,
    asymptotic_scaling_function,
    blocks_per_exponent,
    build_scaling_curve,
    default_q_grid,
    empirical_scaling_function,
    max_branch_kink,
    ols_slope,
    rate_curve,
    rate_function,
    scaling_function_by_integration,
)
from .series import TimeSeries, as_series, demean
from .simulate import (
    PROCESS_NAMES,
    RngStream,
    SimulationSpec,
    f1_inverse_survival,
    f1_survival,
    f2_inverse_survival,
    f2_survival,
    make_rng,
    run_simulation,
    sample_f1,
    sample_f2,
    sample_stable,
    sample_student,
    simulate_iid,
    simulate_ou_stable,
    simulate_student_diffusion,
)

__version__ = "0.1.0"

__all__ = [
    "DataError",
    "EstimationError",
    "EstimatorTrace",
    "MIN_BLOCKS_DEFAULT",
    "MomentEstimate",
    "PROCESS_NAMES",
    "PartitionGrid",
    "RateParams",
    "RngStream",
    "ScalingCurve",
    "SimulationSpec",
    "TailEstimate",
    "TimeSeries",
    "as_series",
    "asymptotic_scaling_function",
    "block_length",
    "blocks_per_exponent",
    "blocks_used",
    "build_partition_grid",
    "build_scaling_curve",
    "default_q_grid",
    "demean",
    "empirical_scaling_function",
    "estimator_trace",
    "f1_inverse_survival",
    "f1_survival",
    "f2_inverse_survival",
    "f2_survival",
    "fit_tail_index",
    "hill_estimate",
    "make_rng",
    "max_branch_kink",
    "model_gt2",
    "model_le2",
    "moment_estimate",
    "ols_slope",
    "partition_function",
    "qq_points",
    "rate_curve",
    "rate_function",
    "run_simulation",
    "sample_f1",
    "sample_f2",
    "sample_stable",
    "sample_student",
    "scaling_function_by_integration",
    "simulate_iid",
    "simulate_ou_stable",
    "simulate_student_diffusion",
]
