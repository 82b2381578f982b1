"""Bayesian optimization on the unit hypercube with a Beta product kernel.

The package is organized around a non-stationary covariance function built
from products of Beta densities, which is aware of the domain boundary in a
way stationary kernels (RBF, Matern) are not.  On top of it sit exact GP
regression, acquisition-driven search, boundary-aware benchmark settings,
and an empirical eigenvalue-decay analyzer.
"""

from .acquisition import (
    AcquisitionSpec,
    acquisition_values,
    ei_score,
    maximize_acquisition,
    pi_score,
    ucb_score,
)
from .benchmarks import (
    BenchmarkSpec,
    BlackBox,
    BlackBoxError,
    DomainBox,
    InfeasibleSettingError,
    boundary_distance,
    canonical_domain,
    evaluate_function,
    first_optimum,
    from_unit,
    make_benchmark,
    partition_volumes,
    shift_domain,
    subprocess_blackbox,
    to_unit,
)
from .bo import (
    BlackBoxRunError,
    BORecord,
    HyperfitPolicy,
    Summary,
    Trajectory,
    run_bo,
    sobol_init,
    summarize,
)
from .gp import (
    GPState,
    IllConditionedModelError,
    PosteriorMoments,
    fit,
    log_marginal_likelihood,
    optimize_hyperparameters,
    posterior,
    posterior_batch,
    prior_variance,
)
from .kernels import (
    KernelSpec,
    beta_diag_upper_bound,
    beta_kernel,
    beta_kernel_diag,
    beta_kernel_quadrature_oracle,
    kernel_cross,
    kernel_diag,
    kernel_matrix,
    matern_kernel,
    rbf_kernel,
)
from .special import (
    duplication_identity_residual,
    log_beta_fn,
    log_gamma,
    wendel_ratio_bounds,
)
from .spectrum import (
    RegressionResult,
    SpectrumReport,
    decay_report_suite,
    eigendecay_regression,
    expected_spectrum,
)

__version__ = "0.1.0"
