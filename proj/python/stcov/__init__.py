"""Asymmetric space-time covariance models.

Thin wrapper over the compiled core: covariance evaluation, Gaussian field
simulation, exact and Vecchia-approximated log-likelihoods, maximum-likelihood
fitting, and empirical asymmetry diagnostics.  All functions accept plain
numpy arrays; parameter vectors follow ``param_names(family)`` order.
"""

from stcov._core import (
    ConditioningError,
    InitError,
    InsufficientDataError,
    asymmetry,
    cov_matrix,
    default_init,
    eval_cov,
    family_names,
    fit,
    loglik,
    param_names,
    simulate,
)

__all__ = [
    "ConditioningError",
    "InitError",
    "InsufficientDataError",
    "asymmetry",
    "cov_matrix",
    "default_init",
    "eval_cov",
    "family_names",
    "fit",
    "loglik",
    "param_names",
    "simulate",
]
