"""Rescaled derivatives G_k, their limit G_inf, and contour zero counting.

G_k(z) = (-1)**(k+1) sqrt(k / 2 pi) e**k z**(k+2) F^(k)(k z) moves the zeros
of F^(k) from [k tau_min, k tau_max] back to [tau_min, tau_max].  As k grows
it converges uniformly on compact rectangles to

    G_inf(z) = sum_i K_i (V_i z - 1) exp(-1 / (d_i z)),
    K_i = c_i (1/(c_i d_i**2) + 1/d_i**4),  V_i = 2 / (d_i/c_i + 1/d_i).

Writing r_ik = a_ik / b_ik, each term of G_k simplifies to

    2 c_i / d_i**3 * (z - r_ik / k) * S_k * (1 + 1/(k d_i z))**-(k+2)

where S_k = k! / (sqrt(2 pi k) (k/e)**k) is the Stirling ratio.  Evaluating
that form keeps every factor of order one, so no factorial or power of k is
ever formed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .errors import (
    DomainError,
    IndexOutOfRange,
    PoleAtOrigin,
    QuadratureUnstable,
    ZeroOnContour,
)
from .fracsum import K_MAX, FractionSumParams, tau_bounds, term_zeros
from .rootlocus import DEFAULT_TOL, MAX_BISECTIONS

ComplexFn = Callable[[np.ndarray], np.ndarray]

CONTOUR_SAMPLES = 10_000
EPS_START_FRACTION = 0.1
EPS_MAX_HALVINGS = 20
NEWTON_CLEARANCE = 1e-3
NEAR_ZERO_FRACTION = 1e-6
CONTOUR_CLEARANCE = 1e-8
INTEGER_SLACK = 0.2

_POLE_GUARD = 1e-300


@dataclass(frozen=True)
class Rectangle:
    x_lo: float
    x_hi: float
    eps: float

    def __post_init__(self):
        if not self.x_lo < self.x_hi:
            raise DomainError(f"rectangle needs x_lo < x_hi, got {self.x_lo!r}, {self.x_hi!r}")
        if not self.eps > 0.0:
            raise DomainError(f"rectangle half-height must be positive, got {self.eps!r}")


@dataclass(frozen=True)
class ZeroCount:
    count: int
    winding: float
    rect: Rectangle
    halving_limit_reached: bool


def v_infinity(p: FractionSumParams, i: int) -> float:
    """Limit of k b_ik / a_ik for term ``i`` (0-based)."""
    if not 0 <= i < p.n:
        raise IndexOutOfRange(f"term index {i} outside [0, {p.n})")
    c, d = p.c[i], p.d[i]
    return 2.0 / (d / c + 1.0 / d)


def limit_weights(p: FractionSumParams) -> tuple[np.ndarray, np.ndarray]:
    """Per-term weights K_i and limits V_i of G_inf."""
    c, d = p.c_arr, p.d_arr
    k_weight = c * (1.0 / (c * d * d) + 1.0 / d**4)
    v_inf = 2.0 / (d / c + 1.0 / d)
    return k_weight, v_inf


def _as_complex(z) -> np.ndarray:
    return np.asarray(z, dtype=complex)


def _out(values: np.ndarray, like):
    if np.ndim(like) == 0:
        return complex(values)
    return values


def g_inf_scaled(p: FractionSumParams, z) -> tuple[np.ndarray, np.ndarray]:
    """G_inf and its derivative, both divided by the same positive number.

    The divisor is the largest |K_i exp(-1/(d_i z))| at each point, so the
    ratio G_inf'/G_inf is exact while neither value underflows near the
    essential singularity at the origin.
    """
    zz = _as_complex(z)
    if np.any(np.abs(zz) < _POLE_GUARD):
        raise PoleAtOrigin("G_inf has an essential singularity at z = 0")
    zs = zz[..., None]
    k_weight, v_inf = limit_weights(p)
    d = p.d_arr
    expo = np.log(k_weight) - 1.0 / (d * zs)
    shift = np.max(expo.real, axis=-1, keepdims=True)
    w = np.exp(expo - shift)
    lin = v_inf * zs - 1.0
    val = np.sum(lin * w, axis=-1)
    dval = np.sum((v_inf + lin / (d * zs * zs)) * w, axis=-1)
    return val, dval


def g_inf_unwound(p: FractionSumParams, z) -> tuple[np.ndarray, np.ndarray]:
    """H = exp(1/(d_max z)) G_inf and H', divided by a common positive number.

    The removed factor is analytic and zero-free for z != 0, so H has the
    same zeros as G_inf, but without the fast phase rotation exp(-1/(d z))
    picks up near the origin.  Contour counts use H.
    """
    zz = _as_complex(z)
    if np.any(np.abs(zz) < _POLE_GUARD):
        raise PoleAtOrigin("G_inf has an essential singularity at z = 0")
    zs = zz[..., None]
    k_weight, v_inf = limit_weights(p)
    rate = 1.0 / p.d_arr - 1.0 / np.max(p.d_arr)
    expo = np.log(k_weight) - rate / zs
    shift = np.max(expo.real, axis=-1, keepdims=True)
    w = np.exp(expo - shift)
    lin = v_inf * zs - 1.0
    val = np.sum(lin * w, axis=-1)
    dval = np.sum((v_inf + lin * rate / (zs * zs)) * w, axis=-1)
    return val, dval


def eval_G_inf(p: FractionSumParams, z):
    zz = _as_complex(z)
    if np.any(np.abs(zz) < _POLE_GUARD):
        raise PoleAtOrigin("G_inf has an essential singularity at z = 0")
    zs = zz[..., None]
    k_weight, v_inf = limit_weights(p)
    with np.errstate(under="ignore"):
        terms = k_weight * (v_inf * zs - 1.0) * np.exp(-1.0 / (p.d_arr * zs))
    return _out(terms.sum(axis=-1), z)


def eval_G_inf_deriv(p: FractionSumParams, z):
    zz = _as_complex(z)
    if np.any(np.abs(zz) < _POLE_GUARD):
        raise PoleAtOrigin("G_inf has an essential singularity at z = 0")
    zs = zz[..., None]
    k_weight, v_inf = limit_weights(p)
    d = p.d_arr
    lin = v_inf * zs - 1.0
    with np.errstate(under="ignore"):
        terms = k_weight * (v_inf + lin / (d * zs * zs)) * np.exp(-1.0 / (d * zs))
    return _out(terms.sum(axis=-1), z)


def log_stirling_ratio(k: int) -> float:
    return math.lgamma(k + 1) - (k + 0.5) * math.log(k) + k - 0.5 * math.log(2.0 * math.pi)


def stirling_ratio(k: int) -> float:
    """k! / (sqrt(2 pi k) (k/e)**k), via log-gamma."""
    if int(k) != k or k < 1:
        raise DomainError(f"stirling_ratio needs k >= 1, got {k!r}")
    return math.exp(log_stirling_ratio(int(k)))


def eval_G_k(p: FractionSumParams, k: int, z):
    if int(k) != k or not 1 <= k <= K_MAX:
        raise DomainError(f"order {k!r} outside [1, {K_MAX}]")
    zz = _as_complex(z)
    if np.any(zz.real <= 0.0):
        raise DomainError("G_k is evaluated on Re(z) > 0 only")
    zs = zz[..., None]
    c, d = p.c_arr, p.d_arr
    shifted = zs - term_zeros(p, k) / k
    with np.errstate(under="ignore"):
        damp = np.exp(log_stirling_ratio(k) - (k + 2) * np.log1p(1.0 / (k * d * zs)))
    terms = 2.0 * c / d**3 * shifted * damp
    return _out(terms.sum(axis=-1), z)


def convergence_report(
    p: FractionSumParams,
    k_list: Iterable[int],
    grid_n: int = 512,
) -> list[tuple[int, float]]:
    """sup |G_k - G_inf| over a uniform real grid on [tau_min, tau_max], per k."""
    if grid_n < 2:
        raise DomainError("grid_n must be at least 2")
    tau_min, tau_max = tau_bounds(p)
    xs = np.linspace(tau_min, tau_max, int(grid_n))
    limit = eval_G_inf(p, xs)
    return [(int(k), float(np.max(np.abs(eval_G_k(p, k, xs) - limit)))) for k in k_list]


def _bisect_real(sign_of: Callable[[float], float], lo: float, hi: float, tol: float) -> float:
    s_lo = sign_of(lo)
    if s_lo == 0.0:
        return lo
    if sign_of(hi) == s_lo:
        raise DomainError("interval does not straddle a sign change")
    for _ in range(MAX_BISECTIONS):
        mid = 0.5 * (lo + hi)
        if hi - lo <= tol * max(1.0, mid):
            break
        s = sign_of(mid)
        if s == 0.0:
            return mid
        if s == s_lo:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def real_zero_G_inf(p: FractionSumParams, tol: float = DEFAULT_TOL) -> float:
    """A real zero of G_inf in [tau_min, tau_max] (the only one in typical cases)."""
    tau_min, tau_max = tau_bounds(p)
    return _bisect_real(lambda x: float(np.sign(g_inf_scaled(p, x)[0].real)), tau_min, tau_max, tol)


def real_zero_G_k(p: FractionSumParams, k: int, tol: float = DEFAULT_TOL) -> float:
    """A real zero of G_k in [tau_min, tau_max], located on G_k itself."""
    tau_min, tau_max = tau_bounds(p)
    return _bisect_real(lambda x: float(np.sign(eval_G_k(p, k, x).real)), tau_min, tau_max, tol)


MAX_CONTOUR_NODES = 2_000_000
_PHASE_STEP = math.pi / 32.0
_LOG_MAG_STEP = 0.1
_MIN_DT = 1e-13


def _sides(rect: Rectangle, log_x: bool):
    """The four counter-clockwise sides as (z(t), dz/dt) maps on t in [0, 1]."""
    lo, hi, eps = rect.x_lo, rect.x_hi, rect.eps

    def horizontal(a: float, b: float, y: float):
        if log_x:
            ratio = math.log(b / a)
            return lambda t: (a * np.exp(ratio * t) + 1j * y, a * np.exp(ratio * t) * ratio + 0j)
        return lambda t: (a + (b - a) * t + 1j * y, np.full(t.shape, complex(b - a)))

    def vertical(x: float, y0: float, y1: float):
        return lambda t: (x + 1j * (y0 + (y1 - y0) * t), np.full(t.shape, 1j * (y1 - y0)))

    return [
        horizontal(lo, hi, -eps),
        vertical(hi, -eps, eps),
        horizontal(hi, lo, eps),
        vertical(lo, eps, -eps),
    ]


def contour_points(
    fn: ComplexFn,
    rect: Rectangle,
    samples_per_side: int,
    log_x: bool = False,
) -> list[tuple[np.ndarray, np.ndarray, np.ndarray]]:
    """Per side: parameter nodes t, points z(t) and f(z(t)).

    Each side starts from ``samples_per_side`` uniform intervals in t; any
    interval over which arg f turns by more than pi/32, or log|f| moves by
    more than 0.1, is split until none does.  That resolves the narrow
    features f'/f develops next to zeros close to the boundary.
    Uniform spacing in log x (``log_x``) suits functions whose scale grows
    with x, such as G_inf on a long interval.
    """
    if log_x and rect.x_lo <= 0.0:
        raise DomainError("log spacing needs x_lo > 0")
    out = []
    budget = MAX_CONTOUR_NODES // 4
    for side in _sides(rect, log_x):
        t = np.linspace(0.0, 1.0, int(samples_per_side) + 1)
        z = side(t)[0]
        f = fn(z)
        while True:
            with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
                step = np.log(f[1:] / f[:-1])
            smooth = (np.abs(step.imag) <= _PHASE_STEP) & (np.abs(step.real) <= _LOG_MAG_STEP)
            # intervals at roundoff width cannot be split further
            coarse = np.nonzero(~smooth & (np.diff(t) > _MIN_DT))[0]
            if coarse.size == 0 or t.size + coarse.size > budget or np.any(f == 0.0):
                break
            t_new = 0.5 * (t[coarse] + t[coarse + 1])
            z_new = side(t_new)[0]
            f_new = fn(z_new)
            order = np.argsort(np.concatenate([t, t_new]), kind="stable")
            t = np.concatenate([t, t_new])[order]
            z = np.concatenate([z, z_new])[order]
            f = np.concatenate([f, f_new])[order]
        out.append((t, z, f))
    return out


def winding_number(
    fn: ComplexFn,
    dfn: ComplexFn,
    rect: Rectangle,
    samples_per_side: int = CONTOUR_SAMPLES,
    log_x: bool = False,
) -> float:
    """(1 / 2 pi i) of the contour integral of f'/f, before rounding.

    Composite trapezoid rule over each side of the (refined) boundary.
    ``fn`` and ``dfn`` may both be divided by any common nonzero factor at
    each point; only their ratio enters the integral.
    """
    pieces = contour_points(fn, rect, samples_per_side, log_x)
    mag = np.concatenate([np.abs(f) for _, _, f in pieces])
    floor = CONTOUR_CLEARANCE * float(np.median(mag))
    if not float(mag.min()) >= floor:
        raise ZeroOnContour(f"min |f| = {mag.min():.3e} on the boundary is below {floor:.3e}")
    total = 0j
    for side, (t, z, f) in zip(_sides(rect, log_x), pieces):
        g = dfn(z) / f * side(t)[1]
        total += np.sum(0.5 * (g[1:] + g[:-1]) * np.diff(t))
    return float((total / (2j * math.pi)).real)


def count_zeros_rectangle(
    fn: ComplexFn,
    dfn: ComplexFn,
    rect: Rectangle,
    samples_per_side: int = CONTOUR_SAMPLES,
    log_x: bool = False,
) -> int:
    """Number of zeros of an analytic ``fn`` inside ``rect`` by the argument principle.

    Raises
    ------
    ZeroOnContour
        If ``fn`` comes too close to zero on the boundary.
    QuadratureUnstable
        If the unrounded winding number is not within 0.2 of an integer.
    """
    w = winding_number(fn, dfn, rect, samples_per_side, log_x)
    n = round(w)
    if abs(w - n) > INTEGER_SLACK:
        raise QuadratureUnstable(f"winding number {w:.4f} is not near an integer")
    return int(n)


def adaptive_rectangle(p: FractionSumParams, samples_per_side: int = CONTOUR_SAMPLES) -> tuple[Rectangle, bool]:
    """Rectangle over [tau_min, tau_max] whose boundary keeps clear of G_inf's zeros.

    The half-height starts at 0.1 min(tau_max - tau_min, tau_min); keeping
    it below tau_min stays away from the essential singularity at the origin,
    near which G_inf has many complex zeros.  It is halved while some
    boundary node has Newton distance |G_inf / G_inf'| below 1e-3 eps and
    |G_inf| below 1e-6 of its median on the boundary, i.e. while a zero sits
    on (or almost on) the boundary.  The magnitude condition keeps the fast
    variation near the singularity from passing for a zero.  The flag
    reports whether the halving budget ran out.
    """
    tau_min, tau_max = tau_bounds(p)
    eps = EPS_START_FRACTION * min(tau_max - tau_min, tau_min)
    fn = lambda z: g_inf_unwound(p, z)[0]  # noqa: E731
    for _ in range(EPS_MAX_HALVINGS + 1):
        rect = Rectangle(tau_min, tau_max, eps)
        pieces = contour_points(fn, rect, samples_per_side, log_x=True)
        z = np.concatenate([zz for _, zz, _ in pieces])
        f, df = g_inf_unwound(p, z)
        with np.errstate(divide="ignore", invalid="ignore"):
            reach = np.abs(f / df)
        small = np.abs(f) < NEAR_ZERO_FRACTION * float(np.median(np.abs(f)))
        if not np.any(small & (reach < NEWTON_CLEARANCE * eps)):
            return rect, False
        eps *= 0.5
    return Rectangle(tau_min, tau_max, eps * 2.0), True


def count_G_inf_zeros(p: FractionSumParams, samples_per_side: int = CONTOUR_SAMPLES) -> ZeroCount:
    """Zeros of G_inf inside the adaptive rectangle, by the argument principle."""
    rect, limit = adaptive_rectangle(p, samples_per_side)
    fn = lambda z: g_inf_unwound(p, z)[0]  # noqa: E731
    dfn = lambda z: g_inf_unwound(p, z)[1]  # noqa: E731
    w = winding_number(fn, dfn, rect, samples_per_side, log_x=True)
    n = round(w)
    if abs(w - n) > INTEGER_SLACK:
        raise QuadratureUnstable(f"winding number {w:.4f} is not near an integer")
    return ZeroCount(int(n), w, rect, limit)
