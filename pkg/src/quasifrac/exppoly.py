"""Real exponential polynomials f(x) = sum_i (a_i x - b_i) exp(-alpha_i x).

With a_i, b_i, alpha_i > 0, f(0) = -sum b_i < 0 and every term is
nonnegative beyond max b_i / a_i, so [0, max b_i / a_i] always brackets a
positive zero.  For most coefficient draws that zero is the only one, but
not for all: (x - 1) e**(-10 x) + 1e-9 (x - 10) e**(-0.01 x) changes sign
three times.  ``find_unique_positive_zero`` returns a crossing in the
bracket; ``count_sign_changes`` tells the caller whether it is unique.

The auxiliary transform

    g_m(x) = exp((alpha_min - 1/m) x) f(x)
           = sum_i (a_i x - b_i) exp(-beta_i x),  beta_i = alpha_i - alpha_min + 1/m,

has the same zeros as f and the closed-form derivatives implemented in
``g_m_eval``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .asymptotic import limit_weights
from .errors import (
    DomainError,
    EmptyInput,
    LengthMismatch,
    NonFinite,
    NonPositiveCoefficient,
)
from .fracsum import FractionSumParams
from .rootlocus import DEFAULT_TOL, MAX_BISECTIONS

ORACLE_GRID = 1_000_000


@dataclass(frozen=True)
class ExpPolyParams:
    a: tuple[float, ...]
    b: tuple[float, ...]
    alpha: tuple[float, ...]

    @property
    def n(self) -> int:
        return len(self.a)

    def arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return (
            np.asarray(self.a, dtype=float),
            np.asarray(self.b, dtype=float),
            np.asarray(self.alpha, dtype=float),
        )

    @property
    def upper_bracket(self) -> float:
        """max b_i / a_i; f is nonnegative from here on."""
        a, b, _ = self.arrays()
        return float(np.max(b / a))


def new_exppoly(a: Sequence[float], b: Sequence[float], alpha: Sequence[float]) -> ExpPolyParams:
    cols = {"a": [float(v) for v in a], "b": [float(v) for v in b], "alpha": [float(v) for v in alpha]}
    lengths = {len(v) for v in cols.values()}
    if lengths == {0}:
        raise EmptyInput("at least one (a, b, alpha) term is required")
    if len(lengths) != 1:
        raise LengthMismatch(
            "a, b, alpha have lengths " + ", ".join(str(len(v)) for v in cols.values())
        )
    for name, vals in cols.items():
        for i, v in enumerate(vals):
            if not math.isfinite(v):
                raise NonFinite(f"{name}[{i}] is not finite")
            if v <= 0.0:
                raise NonPositiveCoefficient(f"{name}[{i}] = {v!r} is not strictly positive")
    return ExpPolyParams(tuple(cols["a"]), tuple(cols["b"]), tuple(cols["alpha"]))


def _check_x(x) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError("x must be finite")
    if np.any(arr < 0.0):
        raise DomainError("x must be nonnegative")
    return arr


def _out(values: np.ndarray, like):
    if np.ndim(like) == 0:
        return float(values)
    return values


def _sum_terms(p: ExpPolyParams, xs: np.ndarray, rates: np.ndarray) -> np.ndarray:
    a, b, _ = p.arrays()
    x = xs[..., None]
    with np.errstate(under="ignore"):
        return np.sum((a * x - b) * np.exp(-rates * x), axis=-1)


def eval_exppoly(p: ExpPolyParams, x):
    """f(x) for scalar or array x >= 0.

    Examples
    --------
    >>> eval_exppoly(new_exppoly([1.0], [1.0], [1.0]), 1.0)
    0.0
    """
    xa = _check_x(x)
    _, _, alpha = p.arrays()
    return _out(_sum_terms(p, xa, alpha), x)


def _shifted(p: ExpPolyParams, x: np.ndarray) -> np.ndarray:
    # exp(alpha_min x) f(x): same sign as f, but does not underflow to 0
    _, _, alpha = p.arrays()
    return _sum_terms(p, x, alpha - alpha.min())


def exppoly_sign(p: ExpPolyParams, x):
    return _out(np.sign(_shifted(p, _check_x(x))), x)


def find_unique_positive_zero(p: ExpPolyParams, tol: float = DEFAULT_TOL) -> float:
    """Positive zero of f by bisection on [0, max b_i / a_i].

    Examples
    --------
    >>> find_unique_positive_zero(new_exppoly([5.0], [2.0], [0.3]))
    0.4
    """
    if not tol > 0.0:
        raise DomainError("tol must be positive")
    left, right = 0.0, p.upper_bracket
    if exppoly_sign(p, right) == 0.0:
        return right
    for _ in range(MAX_BISECTIONS):
        mid = 0.5 * (left + right)
        if right - left <= tol * max(1.0, mid):
            break
        s = exppoly_sign(p, mid)
        if s == 0.0:
            return mid
        if s < 0.0:
            left = mid
        else:
            right = mid
    return 0.5 * (left + right)


def _grid_signs(p: ExpPolyParams, grid_points: int) -> tuple[np.ndarray, np.ndarray]:
    xs = np.linspace(0.0, p.upper_bracket, int(grid_points))
    s = np.sign(_shifted(p, xs))
    # every term is >= 0 at max b_i/a_i; a zero or negative reading there is
    # the root itself sitting on the endpoint, or rounding in a x - b
    s[-1] = 1.0
    keep = s != 0.0
    return xs[keep], s[keep]


def count_sign_changes(p: ExpPolyParams, grid_points: int = ORACLE_GRID) -> int:
    """Sign flips of f on a uniform grid over [0, max b_i / a_i], zeros skipped."""
    _, s = _grid_signs(p, grid_points)
    return int(np.count_nonzero(s[1:] != s[:-1]))


def grid_crossings(p: ExpPolyParams, grid_points: int = ORACLE_GRID) -> tuple[np.ndarray, float]:
    """Midpoints of grid cells where f changes sign, and the grid step."""
    xs, s = _grid_signs(p, grid_points)
    cells = np.nonzero(s[1:] != s[:-1])[0]
    step = p.upper_bracket / (int(grid_points) - 1)
    return 0.5 * (xs[cells] + xs[cells + 1]), step


def _betas(p: ExpPolyParams, m: int) -> np.ndarray:
    if int(m) != m or m < 1:
        raise DomainError(f"m must be a positive integer, got {m!r}")
    _, _, alpha = p.arrays()
    # argmin picks the lowest index on ties; the tied terms all get beta = 1/m
    return alpha - alpha[int(np.argmin(alpha))] + 1.0 / m


def g_m_eval(p: ExpPolyParams, m: int, x, order: int = 0):
    """g_m or its first or second derivative at x >= 0.

    Per term, with beta = alpha - alpha_min + 1/m:

    - order 0: (a x - b) e**(-beta x)
    - order 1: (a + beta b - beta a x) e**(-beta x)
    - order 2: beta (beta a x - beta b - 2 a) e**(-beta x)
    """
    if order not in (0, 1, 2):
        raise DomainError(f"order must be 0, 1 or 2, got {order!r}")
    xa = _check_x(x)
    beta = _betas(p, m)
    a, b, _ = p.arrays()
    xs = xa[..., None]
    if order == 0:
        poly = a * xs - b
    elif order == 1:
        poly = a + beta * b - beta * a * xs
    else:
        poly = beta * (beta * a * xs - beta * b - 2.0 * a)
    with np.errstate(under="ignore"):
        vals = np.sum(poly * np.exp(-beta * xs), axis=-1)
    return _out(vals, x)


def g2_zero_interval(p: ExpPolyParams, m: int) -> tuple[float, float]:
    """Smallest and largest per-term zero b_i/a_i + 2/beta_i of g_m''.

    Every term of g_m'' is negative left of the interval and positive right
    of it, so all zeros of g_m'' lie inside.
    """
    beta = _betas(p, m)
    a, b, _ = p.arrays()
    z = b / a + 2.0 / beta
    return float(z.min()), float(z.max())


def exppoly_from_fracsum(p: FractionSumParams) -> ExpPolyParams:
    """Coefficients of x G_inf(1/x) = -sum K_i (x - V_i) e**(-x / d_i).

    Up to the overall sign this is f with a_i = K_i, b_i = K_i V_i and
    alpha_i = 1 / d_i, so each term vanishes at x = V_i, i.e. z = 1 / V_i.
    """
    k_w, v = limit_weights(p)
    return new_exppoly(k_w, k_w * v, 1.0 / p.d_arr)


def zero_of_G_inf_via_exppoly(p: FractionSumParams, tol: float = DEFAULT_TOL) -> float:
    """Real positive zero of G_inf, as 1 / (zero of the mapped exponential polynomial).

    Examples
    --------
    >>> from quasifrac.fracsum import new_params
    >>> zero_of_G_inf_via_exppoly(new_params([1.0], [2.0]))
    1.25
    """
    x0 = find_unique_positive_zero(exppoly_from_fracsum(p), tol)
    return 1.0 / x0


__all__ = [
    "ExpPolyParams",
    "count_sign_changes",
    "eval_exppoly",
    "exppoly_from_fracsum",
    "exppoly_sign",
    "find_unique_positive_zero",
    "g2_zero_interval",
    "g_m_eval",
    "grid_crossings",
    "new_exppoly",
    "zero_of_G_inf_via_exppoly",
]
