"""Location estimation under heteroskedastic Gaussian noise.

Thin wrapper over the C++ core; see ``scalemix._core`` for signatures.
"""

from ._core import (
    Error,
    MixingDistribution,
    bernstein_bound,
    chebyshev_coefficients,
    fit_joint,
    fit_npmle,
    hellinger_sq,
    iterative_truncation,
    kkt_score,
    known_prior_mle,
    log_mixture_density,
    minimal_degree,
    modulus_of_continuity,
    oracle_linear,
    sample_median,
    separable_expansion,
    simulate,
    total_log_likelihood,
    verify,
)

__all__ = [
    "Error",
    "MixingDistribution",
    "bernstein_bound",
    "chebyshev_coefficients",
    "fit_joint",
    "fit_npmle",
    "hellinger_sq",
    "iterative_truncation",
    "kkt_score",
    "known_prior_mle",
    "log_mixture_density",
    "minimal_degree",
    "modulus_of_continuity",
    "oracle_linear",
    "sample_median",
    "separable_expansion",
    "simulate",
    "total_log_likelihood",
    "verify",
]
