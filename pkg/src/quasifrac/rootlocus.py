"""Bracketing, locating and certifying the unique positive zero of F^(k).

For every k >= 1 the zeros of F^(k) lie in [k tau_min, k tau_max]: outside
that interval all numerators b_ik x - a_ik share one sign.  Bisection on the
sign of the scaled derivative started from that bracket always lands on a
sign change.

For typical coefficients F' changes sign exactly once and that crossing is
the global minimizer.  This is not true for every positive (c, d): with
c = (10, 1e-4), d = (10, 1e-3) F' changes sign three times and F has two
local minima.  ``minimize`` therefore scans F' over the bracket and, if it
finds more than one crossing, refines all of them and keeps the lowest.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import BracketFailure, DomainError, NumericalFailure
from .fracsum import FractionSumParams, deriv_sign, eval_deriv_scaled, eval_f, tau_bounds

DEFAULT_TOL = 1e-10
MAX_BISECTIONS = 200
MAX_DOUBLINGS = 60
CERTIFY_GRID = 100_000
ORACLE_GRID = 1_000_000


@dataclass(frozen=True)
class ZeroBracket:
    k: int
    lo: float
    hi: float


@dataclass(frozen=True)
class ZeroCertificate:
    x_z: float
    f_at_xz: float
    second_deriv_scaled: float
    sign_changes_k1: int
    sign_changes_k2: int
    bracket_width_final: float

    @property
    def passed(self) -> bool:
        return (
            self.sign_changes_k1 == 1
            and self.sign_changes_k2 == 1
            and self.second_deriv_scaled > 0.0
        )

    def csv_row(self) -> list[str]:
        return [
            repr(self.x_z),
            repr(self.f_at_xz),
            repr(self.second_deriv_scaled),
            str(self.sign_changes_k1),
            str(self.sign_changes_k2),
            "PASS" if self.passed else "FAIL",
        ]


CERTIFICATE_HEADER = [
    "x_z",
    "f_at_xz",
    "second_deriv_scaled",
    "sign_changes_k1",
    "sign_changes_k2",
    "pass",
]


def zero_bracket(p: FractionSumParams, k: int) -> ZeroBracket:
    if int(k) != k or k < 1:
        raise DomainError(f"derivative order must be >= 1, got {k!r}")
    tau_min, tau_max = tau_bounds(p)
    return ZeroBracket(int(k), k * tau_min, k * tau_max)


def count_sign_changes(p: FractionSumParams, k: int, grid_points: int = CERTIFY_GRID) -> int:
    """Sign flips of the scaled k-th derivative over a uniform grid on [0, 2 hi].

    Samples whose sign is exactly zero are skipped, so a grid point that lands
    on a root does not register as two flips.
    """
    if grid_points < 2:
        raise DomainError("grid_points must be at least 2")
    hi = zero_bracket(p, k).hi
    xs = np.linspace(0.0, 2.0 * hi, int(grid_points))
    return _count_flips(deriv_sign(p, k, xs))


def _count_flips(signs: np.ndarray) -> int:
    s = signs[signs != 0.0]
    return int(np.count_nonzero(s[1:] != s[:-1]))


def _nudge(x: float) -> float:
    return x + max(abs(x), 1.0) * 4.0 * np.finfo(float).eps


def _sign_at(p: FractionSumParams, k: int, x: float) -> tuple[float, float]:
    s = deriv_sign(p, k, x)
    # exact zeros at probes are a measure-zero event; step off them
    for _ in range(8):
        if s != 0.0:
            break
        x = _nudge(x)
        s = deriv_sign(p, k, x)
    return x, s


def _bracket(p: FractionSumParams, k: int) -> tuple[float, float, float]:
    """Endpoints (left, right) with opposite derivative signs and the left sign."""
    br = zero_bracket(p, k)
    # all terms share one sign on [0, lo); read it off at the origin
    _, expected_left = _sign_at(p, k, 0.0)
    left, s_left = _sign_at(p, k, br.lo)
    for _ in range(MAX_DOUBLINGS):
        if s_left == expected_left:
            break
        left, s_left = _sign_at(p, k, left / 2.0)
    else:
        raise BracketFailure(f"no left endpoint with the near-zero sign for k={k}")

    right, s_right = _sign_at(p, k, br.hi)
    for _ in range(MAX_DOUBLINGS):
        if s_right == -s_left:
            break
        right, s_right = _sign_at(p, k, 2.0 * right)
    else:
        raise BracketFailure(f"no sign change found for k={k} after {MAX_DOUBLINGS} doublings")
    return left, right, s_left


class MultipleMinimaWarning(UserWarning):
    """F' changes sign more than once; F has several local minima."""


def _bisect(p: FractionSumParams, k: int, tol: float) -> tuple[float, float]:
    if not tol > 0.0:
        raise DomainError("tol must be positive")
    left, right, s_left = _bracket(p, k)
    return _refine(p, k, left, right, s_left, tol)


def _refine(p, k, left, right, s_left, tol):
    for _ in range(MAX_BISECTIONS):
        mid = 0.5 * (left + right)
        if right - left <= tol * max(1.0, mid):
            break
        s = deriv_sign(p, k, mid)
        if s == 0.0:
            return mid, 0.0
        if s == s_left:
            left = mid
        else:
            right = mid
    return 0.5 * (left + right), right - left


def find_unique_zero(p: FractionSumParams, k: int, tol: float = DEFAULT_TOL) -> float:
    """A positive zero of F^(k), by bisection on its sign.

    The bracket [lo, hi] is widened only if the probes there do not already
    straddle a sign change.  When F^(k) has a single positive zero this is
    that zero; otherwise it is one of the crossings in the bracket.
    """
    x, _ = _bisect(p, k, tol)
    return x


def certify_unimodal(
    p: FractionSumParams,
    tol: float = DEFAULT_TOL,
    grid_points: int = CERTIFY_GRID,
) -> ZeroCertificate:
    x_z, width = _bisect(p, 1, tol)
    return ZeroCertificate(
        x_z=x_z,
        f_at_xz=eval_f(p, x_z),
        second_deriv_scaled=eval_deriv_scaled(p, 2, x_z),
        sign_changes_k1=count_sign_changes(p, 1, grid_points),
        sign_changes_k2=count_sign_changes(p, 2, grid_points),
        bracket_width_final=width,
    )


def local_minima(
    p: FractionSumParams,
    tol: float = DEFAULT_TOL,
    grid_points: int = CERTIFY_GRID,
) -> list[float]:
    """Every minus-to-plus crossing of F' seen on the certification grid, refined."""
    hi = zero_bracket(p, 1).hi
    xs = np.linspace(0.0, 2.0 * hi, int(grid_points))
    signs = deriv_sign(p, 1, xs)
    keep = signs != 0.0
    xs, signs = xs[keep], signs[keep]
    cells = np.nonzero((signs[:-1] < 0.0) & (signs[1:] > 0.0))[0]
    return [_refine(p, 1, float(xs[j]), float(xs[j + 1]), -1.0, tol)[0] for j in cells]


def minimize(p: FractionSumParams, tol: float = DEFAULT_TOL) -> tuple[float, float]:
    """Global minimizer of F over [0, inf) and the minimum value.

    The bisection crossing is cross-checked against a grid scan of F'; if the
    scan reveals several local minima the lowest one is returned and a
    :class:`MultipleMinimaWarning` is issued.
    """
    x_star = find_unique_zero(p, 1, tol)
    f_star = eval_f(p, x_star)
    others = local_minima(p, tol)
    if len(others) > 1:
        warnings.warn(
            f"F has {len(others)} local minima on [0, inf); returning the lowest",
            MultipleMinimaWarning,
            stacklevel=2,
        )
        for x in others:
            fx = eval_f(p, x)
            if fx < f_star:
                x_star, f_star = x, fx
    right_probe = 2.0 * zero_bracket(p, 1).hi
    ceiling = min(eval_f(p, 0.0), eval_f(p, right_probe))
    if f_star > ceiling * (1.0 + 1e-12):
        raise NumericalFailure(
            f"minimizer check failed: F(x*)={f_star!r} exceeds boundary value {ceiling!r}"
        )
    return x_star, f_star


def grid_argmin(p: FractionSumParams, x_max: float, grid_points: int = ORACLE_GRID) -> tuple[float, float, float]:
    """Brute-force minimizer on a uniform grid: (x, F(x), grid step)."""
    xs = np.linspace(0.0, x_max, int(grid_points))
    fs = eval_f(p, xs)
    j = int(np.argmin(fs))
    return float(xs[j]), float(fs[j]), float(xs[1] - xs[0])


def default_x_max(p: FractionSumParams) -> float:
    return 10.0 * tau_bounds(p)[1]


__all__ = [
    "CERTIFICATE_HEADER",
    "MultipleMinimaWarning",
    "ZeroBracket",
    "ZeroCertificate",
    "certify_unimodal",
    "count_sign_changes",
    "default_x_max",
    "find_unique_zero",
    "grid_argmin",
    "local_minima",
    "minimize",
    "tau_bounds",
    "zero_bracket",
]
