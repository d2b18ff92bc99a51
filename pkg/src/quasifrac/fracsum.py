"""Sums of quadratic fractions and their closed-form derivatives.

The family handled here is

    F(x) = sum_i (1 + c_i x**2) / (1 + d_i x)**2,    c_i, d_i > 0, x >= 0,

whose k-th derivative (k >= 1) is

    F^(k)(x) = (-1)**(k+1) * sum_i (b_ik x - a_ik) / (1 + d_i x)**(k+2)

with b_ik = 2 k! c_i d_i**(k-1) and
a_ik = b_ik * ((k+1)/2 * d_i/c_i + (k-1)/(2 d_i)).

Every public derivative value is reported divided by 2 k!, which keeps signs
and zero locations intact while avoiding the factorial overflow near k = 171.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    DomainError,
    EmptyInput,
    LengthMismatch,
    NonFinite,
    NonPositiveCoefficient,
    OrderOutOfRange,
)

K_MAX = 300

# |b x - a| below this is an exact zero for sign purposes
_ZERO_GUARD = 1e-300


@dataclass(frozen=True)
class FractionSumParams:
    c: tuple[float, ...]
    d: tuple[float, ...]

    @property
    def n(self) -> int:
        return len(self.c)

    @property
    def c_arr(self) -> np.ndarray:
        return np.asarray(self.c, dtype=float)

    @property
    def d_arr(self) -> np.ndarray:
        return np.asarray(self.d, dtype=float)


@dataclass(frozen=True)
class DerivCoeffs:
    """Per-term coefficients of the k-th derivative, divided by 2 k!.

    ``log_scale`` is ln(2 k!), so ``a_hat[i] * exp(log_scale)`` is the
    unnormalized a_ik whenever that product fits in a double.
    """

    k: int
    a_hat: tuple[float, ...]
    b_hat: tuple[float, ...]
    log_scale: float

    def unnormalized(self) -> tuple[np.ndarray, np.ndarray]:
        scale = math.exp(self.log_scale)
        return np.asarray(self.a_hat) * scale, np.asarray(self.b_hat) * scale


def new_params(c: Sequence[float], d: Sequence[float]) -> FractionSumParams:
    c = [float(v) for v in c]
    d = [float(v) for v in d]
    if len(c) == 0 and len(d) == 0:
        raise EmptyInput("at least one (c, d) term is required")
    if len(c) != len(d):
        raise LengthMismatch(f"c has {len(c)} entries but d has {len(d)}")
    if not all(math.isfinite(v) for v in c + d):
        raise NonFinite("coefficients must be finite")
    for name, vals in (("c", c), ("d", d)):
        for i, v in enumerate(vals):
            if v <= 0.0:
                raise NonPositiveCoefficient(f"{name}[{i}] = {v!r} is not strictly positive")
    return FractionSumParams(tuple(c), tuple(d))


def _check_order(k: int, lowest: int) -> None:
    if int(k) != k or k < lowest or k > K_MAX:
        raise OrderOutOfRange(f"derivative order {k!r} outside [{lowest}, {K_MAX}]")


def _check_x(x) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError("x must be finite")
    if np.any(arr < 0.0):
        raise DomainError("x must be nonnegative")
    return arr


def _scalar_or_array(values: np.ndarray, like):
    if np.ndim(like) == 0:
        return float(values)
    return values


def eval_f(p: FractionSumParams, x):
    """F(x) for a scalar or an array of nonnegative abscissae."""
    xa = _check_x(x)
    xs = xa[..., None]
    c, d = p.c_arr, p.d_arr
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        # divide through by x**2 once x > 1 so that c x**2 cannot overflow
        inv = np.where(xs > 1.0, 1.0 / np.where(xs > 1.0, xs, 1.0), 0.0)
        big = (inv * inv + c) / (inv + d) ** 2
        small = (1.0 + c * xs * xs) / (1.0 + d * xs) ** 2
    terms = np.where(xs > 1.0, big, small)
    return _scalar_or_array(terms.sum(axis=-1), x)


def tau_bounds(p: FractionSumParams) -> tuple[float, float]:
    """(min d/(2c), max d/c + 1/(2d)) over the terms.

    All zeros of F^(k) lie in [k tau_min, k tau_max].
    """
    c, d = p.c_arr, p.d_arr
    return float(np.min(d / (2.0 * c))), float(np.max(d / c + 1.0 / (2.0 * d)))


def term_zeros(p: FractionSumParams, k: int) -> np.ndarray:
    """Zero a_ik / b_ik of each numerator b_ik x - a_ik."""
    c, d = p.c_arr, p.d_arr
    return (k + 1) / 2.0 * d / c + (k - 1) / (2.0 * d)


def deriv_coeffs(p: FractionSumParams, k: int) -> DerivCoeffs:
    _check_order(k, 1)
    c, d = p.c_arr, p.d_arr
    with np.errstate(over="ignore"):
        b_hat = c * d ** (k - 1)
    a_hat = b_hat * term_zeros(p, k)
    log_scale = math.log(2.0) + math.lgamma(k + 1)
    return DerivCoeffs(int(k), tuple(a_hat.tolist()), tuple(b_hat.tolist()), log_scale)


# below this bound on (k+2) ln(1 + d x) the plain quotient cannot overflow
_DIRECT_LOG_LIMIT = 500.0
_DIRECT_MAX_ORDER = 6


def eval_deriv_log(p: FractionSumParams, k: int, x) -> tuple[np.ndarray, np.ndarray]:
    """Sign and log-magnitude of F^(k)(x) / (2 k!), for k >= 1.

    Each term c d**(k-1) (x - r) / (1 + d x)**(k+2) is kept as a
    (sign, log|.|) pair and the terms are combined after shifting by the
    largest exponent, so the result never overflows.  The magnitude may still
    be far below the smallest double, which is why the logarithm is returned.
    Low orders on moderate ranges take a direct route that gives the same
    numbers faster.
    """
    _check_order(k, 1)
    xa = _check_x(x)
    flat = np.atleast_1d(xa).ravel()
    c, d = p.c_arr[:, None], p.d_arr[:, None]
    r = term_zeros(p, k)[:, None]
    diff = flat - r
    b_hat_log = np.log(c) + (k - 1) * np.log(d)

    x_top = float(flat.max()) if flat.size else 0.0
    direct = (
        k <= _DIRECT_MAX_ORDER
        and float(np.max(np.abs(b_hat_log))) < _DIRECT_LOG_LIMIT
        and (k + 2) * math.log1p(float(d.max()) * x_top) < _DIRECT_LOG_LIMIT
    )
    if direct:
        u = 1.0 + d * flat
        power = u * u
        for _ in range(k):
            power = power * u
        total = np.sum(np.exp(b_hat_log) * diff / power, axis=0)
        shift = np.zeros_like(total)
    else:
        # |b_hat x - a_hat| = b_hat |x - r|
        lin_log = b_hat_log + np.log(np.maximum(np.abs(diff), _ZERO_GUARD))
        is_zero = lin_log < math.log(_ZERO_GUARD)
        log_mag = np.where(is_zero, -np.inf, lin_log - (k + 2) * np.log1p(d * flat))
        signs = np.where(is_zero, 0.0, np.sign(diff))
        top = np.max(log_mag, axis=0)
        shift = np.where(np.isfinite(top), top, 0.0)
        total = np.sum(signs * np.exp(log_mag - shift), axis=0)

    if k % 2 == 0:
        total = -total
    with np.errstate(divide="ignore"):
        log_abs = np.log(np.abs(total)) + shift
    shape = np.shape(xa)
    return np.sign(total).reshape(shape), log_abs.reshape(shape)


def deriv_sign(p: FractionSumParams, k: int, x):
    sign, _ = eval_deriv_log(p, k, x)
    return _scalar_or_array(sign, x)


def eval_deriv_scaled(p: FractionSumParams, k: int, x):
    """F^(k)(x) / (2 k!) for k >= 1, and F(x) itself for k = 0.

    Examples
    --------
    >>> p = new_params([1.0], [1.0])
    >>> eval_deriv_scaled(p, 2, 0.0)
    2.0
    """
    if k == 0:
        return eval_f(p, x)
    sign, log_abs = eval_deriv_log(p, k, x)
    with np.errstate(under="ignore", over="ignore"):
        values = sign * np.exp(log_abs)
    values = np.where(sign == 0.0, 0.0, values)
    return _scalar_or_array(values, x)
