"""Sphere-decoding workbench.

Tree-search MIMO detection under three pruning metrics (squared Euclidean,
componentwise modulus, and the squaring-free max over real/imaginary
parts), closed-form expected-complexity and error-probability expressions,
and a seeded Monte Carlo runner that cross-validates the two.
"""

from .analytic import (
    ComplexityReport,
    PairwiseErrorBounds,
    PrefixState,
    TreePruningReport,
    complexity_lower_bound,
    component_cdf_linf,
    component_cdf_ltilde_bounds,
    component_cdf_ltilde_exact,
    component_metric_mgf,
    expected_nodes,
    high_snr_visit_coefficient,
    pairwise_error_bounds,
    radii_ratio,
    radius_l2,
    radius_linf,
    radius_ltilde,
    sample_sum_representation,
    scaling_exponent,
    scaling_term_log,
    tree_pruning_report,
    asymptotic_visit_probability,
)
from .decoder import (
    DecodeOutcome,
    NormKind,
    RadiusSpec,
    RestartSchedule,
    batch_decode,
    decode_fixed,
    decode_restart,
    exhaustive_decode,
    partial_metric_update,
)
from .model import (
    Constellation,
    DecodeProblem,
    DifferenceProfile,
    SystemConfig,
    build_problem,
    child_rng,
    difference_profile,
    make_constellation,
    make_rng,
    qr_reduce,
    sample_channel,
    sigma2_from_snr_db,
    snr_db_from_sigma2,
)
from .montecarlo import (
    EstimateWithCI,
    TrialPlan,
    ks_critical_value,
    ks_statistic,
    ks_two_sample_statistic,
    run_error_rate,
    run_metric_distribution,
    run_node_counts,
    run_restart_complexity,
)
from .special import (
    binomial_weight,
    inv_reg_lower_gamma,
    negative_binomial_weight,
    reg_lower_gamma,
)

__version__ = "0.1.0"
