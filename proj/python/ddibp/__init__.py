"""Distance dependent Indian buffet process: priors, likelihood and MCMC."""

from ddibp._core import (
    DataMatrix,
    DecayFunction,
    DhbpParams,
    DistanceMatrix,
    FeatureMatrix,
    McmcConfig,
    NoiseParams,
    PriorState,
    ProximityMatrix,
    ReachProbs,
    Rng,
    SampleRecord,
    SharingStats,
    build_proximity,
    collapsed_loglik,
    compute_feature_matrix,
    ddibp_limit_fractions,
    ddibp_sharing_rates,
    dhbp_limit_fractions,
    ibp_baseline_sample,
    log_prior,
    reach_probs_exact,
    reach_probs_mc,
    run_chain,
    sample_dhbp,
    sample_prior,
    sharing_stats,
)

__all__ = [
    "DataMatrix",
    "DecayFunction",
    "DhbpParams",
    "DistanceMatrix",
    "FeatureMatrix",
    "McmcConfig",
    "NoiseParams",
    "PriorState",
    "ProximityMatrix",
    "ReachProbs",
    "Rng",
    "SampleRecord",
    "SharingStats",
    "build_proximity",
    "collapsed_loglik",
    "compute_feature_matrix",
    "ddibp_limit_fractions",
    "ddibp_sharing_rates",
    "dhbp_limit_fractions",
    "ibp_baseline_sample",
    "log_prior",
    "reach_probs_exact",
    "reach_probs_mc",
    "run_chain",
    "sample_dhbp",
    "sample_prior",
    "sharing_stats",
]

__version__ = "0.1.0"
