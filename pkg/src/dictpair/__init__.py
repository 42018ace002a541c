"""Coherence analysis, sparsity thresholds, uncertainty relations, and
recovery solvers for dictionaries built as pairs of sub-dictionaries."""

from .common import GuardExceeded
from .dictionaries import (
    ConcatDictionary,
    Dictionary,
    GramSummary,
    build_dirac_fourier,
    build_mub_concat,
    build_random_pair,
    coherence,
    concat_coherences,
    concatenate_pair,
    gram_summary,
    load_dictionary,
    save_dictionary,
    spectral_norm,
    welch_bound,
)
from .probabilistic import (
    ConditionReport,
    RandomSupportSpec,
    check_recovery_conditions,
    randomized_recovery_experiment,
    sample_support,
    scaling_condition_report,
    sigma_min_tail_estimate,
    tail_bound_params,
    two_onb_robust_thresholds,
)
from .solvers import (
    ErcReport,
    P0Result,
    RecoveryOutcome,
    SparseSignal,
    Support,
    basis_pursuit,
    erc_analytic_bound,
    erc_check,
    omp,
    p0_bruteforce,
)
from .spark import SparkCertificate, spark_bruteforce, spark_lower_bounds
from .thresholds import (
    CoherenceTriple,
    ThresholdReport,
    bp_omp_condition,
    threshold_general_p0,
    threshold_pair_bp_omp,
    threshold_pair_p0,
    threshold_pair_symmetric,
    threshold_report,
    threshold_sweep_table,
    threshold_two_onb,
    threshold_two_onb_refined,
)
from .uncertainty import (
    DualRepresentation,
    dual_representation,
    exhaustive_uncertainty_scan,
    uncertainty_lower_bound,
    verify_representation,
)

__version__ = "0.1.0"
