"""Minimize sums of quadratic fractions F(x) = sum (1 + c x**2) / (1 + d x)**2.

Submodules
----------
fracsum     parameters, F and its closed-form scaled derivatives
rootlocus   zero brackets, bisection, certificates, global minimizer
asymptotic  rescaled derivatives G_k, their limit G_inf, contour zero counts
exppoly     exponential polynomials and their positive zero
semiblind   optimal weighting of a regularized semi-blind estimator
cli         command-line front end
"""

from .errors import InvalidInput, NumericalFailure, QuasifracError
from .fracsum import (
    DerivCoeffs,
    FractionSumParams,
    deriv_coeffs,
    eval_deriv_scaled,
    eval_f,
    new_params,
    tau_bounds,
)
from .rootlocus import ZeroCertificate, certify_unimodal, find_unique_zero, minimize

__version__ = "0.1.0"

__all__ = [
    "DerivCoeffs",
    "FractionSumParams",
    "InvalidInput",
    "NumericalFailure",
    "QuasifracError",
    "ZeroCertificate",
    "certify_unimodal",
    "deriv_coeffs",
    "eval_deriv_scaled",
    "eval_f",
    "find_unique_zero",
    "minimize",
    "new_params",
    "tau_bounds",
]
