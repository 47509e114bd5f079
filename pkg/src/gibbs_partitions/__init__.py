"""Exchangeable Gibbs partition models: exact laws, moments, species-sampling
estimators, simulation and brute-force verification."""
from .abundance import AbundanceError, parse_abundance
from .conditional import (
    conditional_marginal,
    conditional_multivariate_gibbs,
    conditional_sampling_formula,
    crp_mixed,
    km_distribution,
    km_pmf,
    new_block_given_s,
    new_block_joint,
    new_singleton_law,
    new_sizes_given_k_s,
    w_factorial_moment,
    w_joint_factorial_moments,
    w_law,
    w_mean,
    w_pmf,
)
from .estimators import (
    SpeciesSamplingEstimator,
    discovery_probability,
    estimate_new_l,
    estimate_old_l,
    one_step_old_l,
)
from .factorials import falling_factorial, rising_factorial
from .models import (
    GibbsModel,
    ModelError,
    PitmanYor,
    TabulatedGibbs,
    ewens,
    load_weights,
    tabulate,
    verify_backward_recursion,
)
from .numeric import SignedLogValue, collect_diagnostics
from .oracle import GuardError, enumerate_partitions, oracle_conditional, oracle_distribution
from .polya import (
    multivariate_polya,
    o_factorial_moment,
    o_joint_factorial_moments,
    o_law,
    o_mean,
    old_block_marginal,
    old_increments_marginal,
    polya_gibbs_joint,
    z_factorial_moment,
)
from .samplers import (
    sample_conditional,
    sample_partition,
    simulate_assignments,
    simulate_conditional,
    simulate_partitions,
)
from .stirling import StirlingTable, central_stirling, noncentral_stirling, stirling_table
from .structures import ObservedSample
from .unconditional import (
    cl_law,
    cl_mean,
    cl_pmf,
    eppf,
    first_block_mean_given_kn,
    gibbs_sampling_formula,
    joint_factorial_moments,
    kn_distribution,
    kn_pmf,
    marginal_given_kn,
    multivariate_gibbs,
    r_marginal,
    singleton_law,
    singleton_mean,
    size_biased_joint,
    size_marginal,
)
from .verification import run_verification

__all__ = [name for name in dir() if not name.startswith("_")]
