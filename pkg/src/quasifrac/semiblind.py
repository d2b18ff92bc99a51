"""Optimal weighting of a regularized semi-blind channel estimator.

In the eigenbasis shared by the blind criterion matrix Q and the training
information matrix M, the asymptotic estimation MSE (up to a positive
constant, fixed to 1 here) is

    MSE(lambda) = sum_i (1 + lambda**2 gamma a_ii) / (1 + lambda gamma d_ii)**2,

where d_ii are the nonzero eigenvalues of Q, a_ii the matching diagonal of
M and gamma the ratio of training to total symbols.  This is F with
c_i = gamma a_ii, d_i = gamma d_ii at x = lambda, so the optimal lambda is
the minimizer of F.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    DomainError,
    EmptyInput,
    LengthMismatch,
    NoConvergence,
    NonFinite,
    NonPositiveCoefficient,
    NonPositiveSpectrum,
    NotAligned,
    NotHermitian,
)
from .fracsum import FractionSumParams, eval_f, new_params
from .rootlocus import DEFAULT_TOL, minimize

DEFAULT_ALIGN_TOL = 1e-8
HERMITIAN_TOL = 1e-12
JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100
# eigenvalues of Q below this fraction of ||Q|| count as zero
ZERO_EIG_TOL = 1e-10
# eigenvalues closer than this fraction of ||Q|| span one degenerate block
DEGENERATE_TOL = 1e-9


@dataclass(frozen=True)
class SpectralMseModel:
    a_diag: tuple[float, ...]
    d_diag: tuple[float, ...]
    gamma: float

    @property
    def n(self) -> int:
        return len(self.a_diag)

    def fraction_params(self) -> FractionSumParams:
        g = self.gamma
        return new_params([g * a for a in self.a_diag], [g * d for d in self.d_diag])


def new_model(a_diag: Sequence[float], d_diag: Sequence[float], gamma: float) -> SpectralMseModel:
    a = [float(v) for v in a_diag]
    d = [float(v) for v in d_diag]
    gamma = float(gamma)
    if not a and not d:
        raise EmptyInput("at least one spectral pair (a, d) is required")
    if len(a) != len(d):
        raise LengthMismatch(f"a has {len(a)} entries but d has {len(d)}")
    if not all(math.isfinite(v) for v in a + d + [gamma]):
        raise NonFinite("spectral data and gamma must be finite")
    for name, vals in (("a", a), ("d", d)):
        for i, v in enumerate(vals):
            if v <= 0.0:
                raise NonPositiveCoefficient(f"{name}[{i}] = {v!r} is not strictly positive")
    if gamma <= 0.0:
        raise DomainError(f"gamma must be positive, got {gamma!r}")
    return SpectralMseModel(tuple(a), tuple(d), gamma)


@dataclass
class HermitianPair:
    q: np.ndarray
    m: np.ndarray
    gamma: float = field(default=1.0)

    def __post_init__(self):
        self.q = np.asarray(self.q, dtype=complex)
        self.m = np.asarray(self.m, dtype=complex)
        for name, mat in (("q", self.q), ("m", self.m)):
            if mat.ndim != 2 or mat.shape[0] != mat.shape[1] or mat.shape[0] == 0:
                raise DomainError(f"{name} must be a nonempty square matrix, got shape {mat.shape}")
            if not np.all(np.isfinite(mat)):
                raise NonFinite(f"{name} has non-finite entries")
        if self.q.shape != self.m.shape:
            raise LengthMismatch(f"q is {self.q.shape} but m is {self.m.shape}")
        if not (math.isfinite(self.gamma) and self.gamma > 0.0):
            raise DomainError(f"gamma must be positive, got {self.gamma!r}")


@dataclass(frozen=True)
class TradeoffRow:
    gamma: float
    lambda_star: float
    mse_star: float


def mse(model: SpectralMseModel, lam):
    """Asymptotic MSE at weighting lambda >= 0 (same evaluation path as F).

    Examples
    --------
    >>> mse(new_model([1.0], [1.0], 4.0), 0.25)
    0.3125
    """
    return eval_f(model.fraction_params(), lam)


def optimal_lambda(model: SpectralMseModel, tol: float = DEFAULT_TOL) -> tuple[float, float]:
    """(lambda*, MSE*) minimizing the MSE over lambda >= 0."""
    return minimize(model.fraction_params(), tol)


def training_tradeoff_scan(
    a_diag: Sequence[float],
    d_diag: Sequence[float],
    gamma_list: Sequence[float],
    tol: float = DEFAULT_TOL,
) -> list[TradeoffRow]:
    if len(gamma_list) == 0:
        raise EmptyInput("gamma_list is empty")
    rows = []
    for g in gamma_list:
        lam, val = optimal_lambda(new_model(a_diag, d_diag, g), tol)
        rows.append(TradeoffRow(float(g), lam, val))
    return rows


def _off_norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a - np.diag(np.diag(a))))


def jacobi_eigh(
    a: np.ndarray,
    tol: float = JACOBI_TOL,
    max_sweeps: int = JACOBI_MAX_SWEEPS,
) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi rotations.

    Each (p, q) step first rotates the phase of a[p, q] away, which leaves a
    real symmetric 2x2 problem, then applies the usual stable rotation.

    Returns
    -------
    w : ndarray
        Eigenvalues, ascending.
    v : ndarray
        Unitary matrix whose columns are the eigenvectors.
    """
    a = np.array(a, dtype=complex)
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    scale = float(np.linalg.norm(a))
    target = tol * scale
    for _ in range(max_sweeps + 1):
        if _off_norm(a) <= target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                h = a[p, q]
                mag = abs(h)
                if mag == 0.0:
                    continue
                phase = h / mag
                theta = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
                c = 1.0 / math.hypot(t, 1.0)
                s = t * c
                # G = diag(1, conj(phase)) on (p, q) followed by the real rotation
                g_pp, g_pq = c, s
                g_qp, g_qq = -s * phase.conjugate(), c * phase.conjugate()
                col_p, col_q = a[:, p].copy(), a[:, q].copy()
                a[:, p] = col_p * g_pp + col_q * g_qp
                a[:, q] = col_p * g_pq + col_q * g_qq
                row_p, row_q = a[p, :].copy(), a[q, :].copy()
                a[p, :] = np.conj(g_pp) * row_p + np.conj(g_qp) * row_q
                a[q, :] = np.conj(g_pq) * row_p + np.conj(g_qq) * row_q
                a[p, q] = a[q, p] = 0.0
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = vp * g_pp + vq * g_qp
                v[:, q] = vp * g_pq + vq * g_qq
    else:
        raise NoConvergence(f"Jacobi did not converge in {max_sweeps} sweeps")
    w = np.diag(a).real.copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def _check_hermitian(name: str, mat: np.ndarray) -> None:
    scale = max(float(np.linalg.norm(mat)), np.finfo(float).tiny)
    if np.linalg.norm(mat - mat.conj().T) > HERMITIAN_TOL * scale:
        raise NotHermitian(f"{name} is not Hermitian")


def _degenerate_blocks(w: np.ndarray, gap: float) -> list[tuple[int, int]]:
    blocks, start = [], 0
    for j in range(1, len(w) + 1):
        if j == len(w) or w[j] - w[j - 1] > gap:
            blocks.append((start, j))
            start = j
    return blocks


def spectral_from_matrices(pair: HermitianPair, align_tol: float = DEFAULT_ALIGN_TOL) -> SpectralMseModel:
    """Spectral MSE model from a Hermitian pair (Q, M) sharing an eigenbasis.

    Q is diagonalized by Jacobi rotations; inside each block of (numerically)
    equal eigenvalues M is diagonalized as well, since any basis of that
    eigenspace is valid for Q.  M must then be diagonal in the resulting
    basis up to ``align_tol`` * ||M||.  Zero eigenvalues of Q are dropped
    together with the matching entries of M.  Pairs come back sorted by
    ascending d, ties by ascending a.
    """
    if not align_tol > 0.0:
        raise DomainError("align_tol must be positive")
    _check_hermitian("q", pair.q)
    _check_hermitian("m", pair.m)
    w, v = jacobi_eigh(pair.q)
    q_norm = float(np.linalg.norm(pair.q))
    m_norm = float(np.linalg.norm(pair.m))

    mt = v.conj().T @ pair.m @ v
    blocks = _degenerate_blocks(w, DEGENERATE_TOL * q_norm)
    block_id = np.zeros(len(w), dtype=int)
    for j, (lo, hi) in enumerate(blocks):
        block_id[lo:hi] = j
        if hi - lo > 1:
            _, u = jacobi_eigh(mt[lo:hi, lo:hi])
            v[:, lo:hi] = v[:, lo:hi] @ u
    mt = v.conj().T @ pair.m @ v

    if _off_norm(mt) > align_tol * m_norm:
        raise NotAligned(
            f"m is not diagonal in the eigenbasis of q (off-diagonal {_off_norm(mt)!r})"
        )
    a_all = np.diag(mt).real
    zero = np.abs(w) <= ZERO_EIG_TOL * q_norm
    if np.any(np.abs(a_all[zero]) > align_tol * m_norm):
        raise NotAligned("m has weight on the null space of q")
    a, d, ids = a_all[~zero], w[~zero], block_id[~zero]
    if a.size == 0:
        raise NonPositiveSpectrum("q has no nonzero eigenvalues")
    if np.any(a <= 0.0) or np.any(d <= 0.0):
        raise NonPositiveSpectrum("retained spectral entries must be strictly positive")
    # equal eigenvalues differ in the last bits; order them by a instead
    order = np.lexsort((a, ids))
    return new_model(a[order].tolist(), d[order].tolist(), pair.gamma)


__all__ = [
    "DEFAULT_ALIGN_TOL",
    "HermitianPair",
    "SpectralMseModel",
    "TradeoffRow",
    "jacobi_eigh",
    "mse",
    "new_model",
    "optimal_lambda",
    "spectral_from_matrices",
    "training_tradeoff_scan",
]
