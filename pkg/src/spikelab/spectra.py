"""Self-adjoint eigenvalue solvers and spectral utilities.

Full spectra come from Householder tridiagonalisation followed by
implicit-shift QL.  Extreme eigenvalues come either from Sturm-sequence
bisection on the tridiagonal form or, for large matrices where only a few
outliers are needed, from a Lanczos iteration with full
reorthogonalisation.  Complex Hermitian matrices are solved through the real
embedding ``[[Re M, -Im M], [Im M, Re M]]`` except on the Lanczos path,
which works in complex arithmetic directly.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from .errors import ConvergenceError, SingularResolvent

__all__ = [
    "SpectralSample",
    "ResolventStats",
    "eigvals_sym",
    "eigvals_hermitian",
    "eigvals",
    "hermitian_embed",
    "eigvals_extreme",
    "resolvent_trace",
    "gap_census",
]

BISECTION_RTOL = 1e-12
PAIRING_RTOL = 1e-8


@dataclass
class SpectralSample:
    """Ordered eigenvalues of one matrix.

    For a full solve ``eigenvalues`` holds all ``N`` values in decreasing
    order.  For a partial solve it holds the ``n_top`` largest (decreasing)
    followed by the ``n_bottom`` smallest (decreasing), and ``partial`` is set.
    """

    eigenvalues: np.ndarray
    N: int
    n_top: int
    n_bottom: int = 0
    partial: bool = False
    config: dict | None = None
    replication_index: int | None = None
    timing: float = 0.0

    @property
    def top(self) -> np.ndarray:
        return self.eigenvalues[: self.n_top]

    @property
    def bottom(self) -> np.ndarray:
        return self.eigenvalues[self.n_top:]

    def eigenvalue(self, index: int) -> float:
        """``lambda_index`` with the 1-based, decreasing convention."""
        if not 1 <= index <= self.N:
            raise IndexError(f"index {index} outside 1..{self.N}")
        if index <= self.n_top:
            return float(self.eigenvalues[index - 1])
        back = self.N - index
        if back < self.n_bottom:
            return float(self.eigenvalues[self.n_top + self.n_bottom - 1 - back])
        raise IndexError(f"eigenvalue {index} was not computed")


@dataclass(frozen=True)
class ResolventStats:
    """Normalised and full resolvent traces at ``z``."""

    z: complex
    trace_gn: complex
    trace_full: complex = field(default=0j)


def _as_square(matrix) -> np.ndarray:
    a = np.asarray(matrix)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if a.shape[0] == 0:
        raise ValueError("empty matrix")
    return a


def _check_selfadjoint(a: np.ndarray):
    scale = max(float(np.max(np.abs(a))), 1.0)
    if not np.allclose(a, a.conj().T, rtol=0.0, atol=1e-12 * scale):
        raise ValueError("matrix is not self-adjoint")


def _tridiagonalize(a: np.ndarray):
    work = np.array(a, dtype=np.float64, order="C", copy=True)
    return K.householder_tridiag(work)


def _sym_values(a: np.ndarray) -> np.ndarray:
    """All eigenvalues of a real symmetric matrix, decreasing."""
    d, e = _tridiagonalize(a)
    vals, fail = K.ql_implicit(d, e)
    if fail >= 0:
        raise ConvergenceError(
            f"QL iteration did not converge for eigenvalue {fail} "
            f"within {K.QL_MAX_SWEEPS} sweeps", index=int(fail))
    return np.sort(vals)[::-1]


def eigvals_sym(matrix, config: dict | None = None, replication_index: int | None = None) -> SpectralSample:
    """All eigenvalues of a real symmetric matrix, in decreasing order.

    Raises
    ------
    ConvergenceError
        When an eigenvalue needs more than 60 QL sweeps.
    """
    a = _as_square(matrix)
    if np.iscomplexobj(a):
        raise TypeError("eigvals_sym takes a real matrix; use eigvals_hermitian")
    _check_selfadjoint(a)
    t0 = time.perf_counter()
    vals = _sym_values(a)
    n = a.shape[0]
    return SpectralSample(vals, n, n, 0, False, config, replication_index, time.perf_counter() - t0)


def hermitian_embed(matrix) -> np.ndarray:
    """Real symmetric ``2N x 2N`` embedding ``[[Re M, -Im M], [Im M, Re M]]``.

    Its spectrum is that of ``M`` with every eigenvalue doubled.
    """
    a = _as_square(matrix)
    re = np.real(a).astype(float)
    im = np.imag(a).astype(float)
    return np.block([[re, -im], [im, re]])


def _unpair(vals: np.ndarray) -> np.ndarray:
    first, second = vals[0::2], vals[1::2]
    scale = max(float(np.max(np.abs(vals))), 1.0)
    gap = float(np.max(np.abs(first - second))) if first.size else 0.0
    if gap > PAIRING_RTOL * scale:
        raise ConvergenceError(f"embedded spectrum is not paired (gap {gap:.3g})")
    return first


def eigvals_hermitian(matrix, config: dict | None = None, replication_index: int | None = None) -> SpectralSample:
    """All eigenvalues of a complex Hermitian matrix, via the real embedding."""
    a = _as_square(matrix)
    _check_selfadjoint(a)
    t0 = time.perf_counter()
    vals = _unpair(_sym_values(hermitian_embed(a)))
    n = a.shape[0]
    return SpectralSample(vals, n, n, 0, False, config, replication_index, time.perf_counter() - t0)


def eigvals(matrix, config: dict | None = None, replication_index: int | None = None) -> SpectralSample:
    """Dispatch to :func:`eigvals_sym` or :func:`eigvals_hermitian` by dtype."""
    if np.iscomplexobj(matrix):
        return eigvals_hermitian(matrix, config, replication_index)
    return eigvals_sym(matrix, config, replication_index)


def _bisection_extremes(a: np.ndarray, k_top: int, k_bottom: int):
    n = a.shape[0]
    if np.iscomplexobj(a):
        d, e = _tridiagonalize(hermitian_embed(a))
        m = 2 * n
        # each eigenvalue appears twice; take the upper copy of every pair
        top_ranks = m - 1 - 2 * np.arange(k_top)
        bottom_ranks = 2 * np.arange(k_bottom)[::-1]
    else:
        d, e = _tridiagonalize(a)
        top_ranks = n - 1 - np.arange(k_top)
        bottom_ranks = np.arange(k_bottom)[::-1]
    lo, hi = K.gershgorin(d, e)
    tol = BISECTION_RTOL * max(abs(lo), abs(hi), 1e-300)
    ranks = np.concatenate([top_ranks, bottom_ranks]).astype(np.int64)
    return K.bisect_eigs(d, e, ranks, tol)


_LANCZOS_SEED = 0x5A17_C0DE


def _lanczos_extremes(a: np.ndarray, k_top: int, k_bottom: int, rtol=1e-10, max_steps=None):
    """Extreme eigenvalues by Lanczos with full reorthogonalisation.

    Convergence is declared when every wanted Ritz pair has residual
    ``beta_m |s_m| <= rtol * ||M||``.  The start vector is deterministic.
    Assumes simple extreme eigenvalues, which holds almost surely for the
    random matrices of this package.
    """
    n = a.shape[0]
    cplx = np.iscomplexobj(a)
    dtype = complex if cplx else float
    rng = np.random.default_rng(_LANCZOS_SEED)
    max_steps = n if max_steps is None else min(max_steps, n)
    Q = np.zeros((n, max_steps + 1), dtype=dtype)

    def fresh(j):
        q = rng.standard_normal(n) + (1j * rng.standard_normal(n) if cplx else 0.0)
        for _ in range(2):
            q = q - Q[:, :j] @ (Q[:, :j].conj().T @ q)
        return q / np.linalg.norm(q)

    Q[:, 0] = fresh(0)
    alpha = np.zeros(max_steps)
    beta = np.zeros(max_steps)
    norm_est = 0.0
    check_every = 5
    m = 0
    while m < max_steps:
        w = a @ Q[:, m]
        alpha[m] = np.real(np.vdot(Q[:, m], w))
        w = w - alpha[m] * Q[:, m]
        if m > 0:
            w = w - beta[m - 1] * Q[:, m - 1]
        for _ in range(2):
            w = w - Q[:, : m + 1] @ (Q[:, : m + 1].conj().T @ w)
        beta[m] = np.linalg.norm(w)
        m += 1
        norm_est = max(norm_est, abs(alpha[m - 1]) + beta[m - 1] + (beta[m - 2] if m > 1 else 0.0))
        if m == n:
            break
        if beta[m - 1] <= 1e-12 * max(norm_est, 1e-300):
            # invariant subspace: restart in its orthogonal complement
            beta[m - 1] = 0.0
            Q[:, m] = fresh(m)
            continue
        Q[:, m] = w / beta[m - 1]
        if m >= k_top + k_bottom + 2 and m % check_every == 0:
            vals, ok = _ritz(alpha[:m], beta[:m], k_top, k_bottom, norm_est, rtol)
            if ok:
                return vals
    vals, _ = _ritz(alpha[:m], beta[:m], k_top, k_bottom, norm_est, rtol, final=True)
    return vals


def _ritz(alpha, beta, k_top, k_bottom, norm_est, rtol, final=False):
    m = alpha.shape[0]
    d = alpha.copy()
    e = beta[: m - 1].copy()
    ranks = np.concatenate([m - 1 - np.arange(k_top), np.arange(k_bottom)[::-1]]).astype(np.int64)
    tol = BISECTION_RTOL * max(norm_est, 1e-300)
    vals = K.bisect_eigs(d, e, ranks, tol)
    if final:
        return vals, True
    for lam in vals:
        s = K.tridiag_inverse_iteration(d, e, lam, 3)
        if beta[m - 1] * abs(s[-1]) > rtol * norm_est:
            return vals, False
    return vals, True


def eigvals_extreme(matrix, k_top: int, k_bottom: int = 0, method: str = "bisection",
                    config: dict | None = None, replication_index: int | None = None) -> SpectralSample:
    """The ``k_top`` largest and ``k_bottom`` smallest eigenvalues.

    Parameters
    ----------
    matrix : array_like
        Real symmetric or complex Hermitian matrix.
    k_top, k_bottom : int
        Number of eigenvalues wanted at each end; ``k_top + k_bottom <= N``.
    method : {'bisection', 'lanczos'}
        ``'bisection'`` runs Sturm bisection on the Householder tridiagonal
        form.  ``'lanczos'`` avoids the ``O(N^3)`` reduction and assumes the
        wanted eigenvalues are simple.

    Returns
    -------
    SpectralSample
        Partial sample; ``top`` and ``bottom`` are both in decreasing order.
    """
    a = _as_square(matrix)
    _check_selfadjoint(a)
    n = a.shape[0]
    k_top, k_bottom = int(k_top), int(k_bottom)
    if k_top < 0 or k_bottom < 0 or k_top + k_bottom > n:
        raise ValueError(f"need 0 <= k_top + k_bottom <= N, got {k_top} + {k_bottom} > {n}")
    t0 = time.perf_counter()
    if method == "bisection":
        vals = _bisection_extremes(a, k_top, k_bottom)
    elif method == "lanczos":
        vals = _lanczos_extremes(a, k_top, k_bottom)
    else:
        raise ValueError(f"unknown method {method!r}")
    partial = k_top + k_bottom < n
    return SpectralSample(np.asarray(vals, dtype=float), n, k_top, k_bottom, partial,
                          config, replication_index, time.perf_counter() - t0)


def _values(sample) -> np.ndarray:
    if isinstance(sample, SpectralSample):
        if sample.partial:
            raise ValueError("a full spectrum is required")
        return np.asarray(sample.eigenvalues, dtype=float)
    return np.asarray(sample, dtype=float)


def resolvent_trace(sample, z) -> ResolventStats:
    """``(1/N) sum_i (z - lambda_i)^-1`` and its ``N``-fold counterpart.

    Raises
    ------
    SingularResolvent
        If ``z`` coincides with an eigenvalue.
    """
    vals = _values(sample)
    z = complex(z)
    diff = z - vals
    if np.any(diff == 0):
        raise SingularResolvent(f"z = {z} is an eigenvalue")
    full = complex(np.sum(1.0 / diff))
    return ResolventStats(z, full / vals.size, full)


def gap_census(sample, gaps) -> list[int]:
    """Number of eigenvalues inside each open interval ``(lo, hi)``."""
    vals = np.sort(_values(sample))
    out = []
    for lo, hi in gaps:
        if hi <= lo:
            out.append(0)
            continue
        n = np.searchsorted(vals, hi, side="left") - np.searchsorted(vals, lo, side="right")
        out.append(int(max(n, 0)))
    return out
