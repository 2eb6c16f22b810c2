"""Fractional Poisson process: Mittag-Leffler functions, multi-point laws, simulation."""

from ._fpp import (
    ConvergenceError,
    InsufficientAcceptance,
    MemoryKernel,
    SupportError,
    __version__,
    counting_pmf,
    epoch_pdf,
    estimate_counting_pmf,
    interarrival_cdf,
    interarrival_pdf,
    joint_pmf,
    joint_pmf_oracle,
    ks_critical_value,
    ks_distance,
    last_epoch_pdf,
    ml_derivative_series,
    ml_derivative_stable,
    ml_one_param,
    ml_two_param,
    residual_lifetime_pdf,
    run_acceptance,
    sample_interarrival,
    stable_cdf,
)
