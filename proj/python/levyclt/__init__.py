"""Edgeworth maps, small-jump sampling and Wasserstein estimators."""

from ._levyclt import (
    ConfigError,
    NumericalFailure,
    cramer_amplify,
    edgeworth_build,
    rate_fit,
    run_experiment,
    sample_small_jumps,
    small_jump_covariance,
    wp_1d_exact,
    wp_empirical,
)

__all__ = [
    "ConfigError",
    "NumericalFailure",
    "cramer_amplify",
    "edgeworth_build",
    "rate_fit",
    "run_experiment",
    "sample_small_jumps",
    "small_jump_covariance",
    "wp_1d_exact",
    "wp_empirical",
]
