"""Central limit theorem for quadratic forms ``Y* B Y``.

For i.i.d. standardized ``y_i`` and a bounded matrix ``B`` with
``(1/N) sum b_ii^2 -> a1^2`` and ``(1/N) Tr B^2 -> a2``,

    (Y* B Y - Tr B) / sqrt(N)  ->  N(0, (E|y|^4 - 1 - t/2) a1^2 + (t/2) a2).

The test matrices (identity, diagonal from a symbol, symmetric circulant)
have ``a1^2`` and ``a2`` exact at every ``N``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import quad
from scipy.special import ndtr

from .analytic import EntryLaw, t_parameter
from .ensemble import replication_rng
from .errors import ConfigError
from .stats import TestVerdict, ks_verdict, summarize, Summary

__all__ = [
    "QuadFormSpec",
    "CltVariancePrediction",
    "QuadFormResult",
    "clt_variance",
    "quadform_stat",
    "quadform_matrix",
    "quadform_batch",
    "mc_quadform",
    "bai_silverstein_ratio",
]

_KINDS = ("identity", "diagonal", "circulant")
CHUNK = 1000


@dataclass(frozen=True)
class QuadFormSpec:
    """Test matrix ``B`` together with the entry law of ``Y``.

    Parameters
    ----------
    matrix_kind : {'identity', 'diagonal', 'circulant'}
    N : int
    law : EntryLaw
        Rescaled internally to unit variance.
    field : {'real', 'complex'}
    symbol : callable, optional
        Diagonal kind: ``b_ii = symbol(i / N)`` for ``i = 1..N``.
    symbol_power : float, optional
        Diagonal kind shortcut for ``symbol(u) = u ** symbol_power``.
    coefficients : tuple of float
        Circulant kind: ``(c_0, ..., c_m)``; ``B_ij = c_k`` when the cyclic
        distance between ``i`` and ``j`` is ``k``.  Requires ``2 m < N``.
    """

    matrix_kind: str
    N: int
    law: EntryLaw
    field: str = "real"
    symbol: Callable | None = None
    symbol_power: float | None = None
    coefficients: tuple = ()

    def __post_init__(self):
        if self.matrix_kind not in _KINDS:
            raise ConfigError(f"unknown matrix kind {self.matrix_kind!r}")
        t_parameter(self.field)
        if self.N < 1:
            raise ConfigError("N must be positive")
        if self.matrix_kind == "diagonal":
            if (self.symbol is None) == (self.symbol_power is None):
                raise ConfigError("diagonal kind needs exactly one of symbol or symbol_power")
            if self.symbol_power is not None and self.symbol_power < 0:
                raise ConfigError("symbol_power must be non-negative")
        if self.matrix_kind == "circulant":
            coeffs = tuple(float(c) for c in self.coefficients)
            if not coeffs:
                raise ConfigError("circulant kind needs coefficients")
            if 2 * (len(coeffs) - 1) >= self.N:
                raise ConfigError(f"circulant with {len(coeffs)} coefficients needs N > {2 * (len(coeffs) - 1)}")
            object.__setattr__(self, "coefficients", coeffs)

    @classmethod
    def circulant_from_row(cls, row, law: EntryLaw, field="real") -> "QuadFormSpec":
        """Build from a full symmetric first row ``(c_0, c_1, ..., c_1)``."""
        row = np.asarray(row, dtype=float)
        N = row.size
        if not np.allclose(row[1:], row[1:][::-1], rtol=0, atol=0):
            raise ConfigError("circulant row must satisfy c_k = c_(N-k)")
        nz = np.flatnonzero(row[: N // 2 + 1])
        m = int(nz[-1]) if nz.size else 0
        return cls("circulant", N, law, field, coefficients=tuple(row[: m + 1]))

    @property
    def t(self) -> int:
        return t_parameter(self.field)

    def _f(self) -> Callable:
        if self.symbol is not None:
            return self.symbol
        p = self.symbol_power
        return lambda u: np.asarray(u, dtype=float) ** p

    def diagonal(self) -> np.ndarray:
        """Diagonal of ``B`` (identity and diagonal kinds)."""
        if self.matrix_kind == "identity":
            return np.ones(self.N)
        if self.matrix_kind == "diagonal":
            u = np.arange(1, self.N + 1) / self.N
            return np.asarray(self._f()(u), dtype=float) * np.ones(self.N)
        return np.full(self.N, self.coefficients[0])

    @property
    def a1_sq(self) -> float:
        """``lim (1/N) sum b_ii^2``."""
        if self.matrix_kind == "identity":
            return 1.0
        if self.matrix_kind == "diagonal":
            return self._symbol_l2()
        return self.coefficients[0] ** 2

    @property
    def a2(self) -> float:
        """``lim (1/N) Tr B^2``."""
        if self.matrix_kind == "identity":
            return 1.0
        if self.matrix_kind == "diagonal":
            return self._symbol_l2()
        c = self.coefficients
        return c[0] ** 2 + 2.0 * math.fsum(x * x for x in c[1:])

    def _symbol_l2(self) -> float:
        if self.symbol_power is not None:
            return 1.0 / (2.0 * self.symbol_power + 1.0)
        val, _ = quad(lambda u: float(self.symbol(u)) ** 2, 0.0, 1.0, epsabs=1e-13, epsrel=1e-12)
        return val

    def trace(self) -> float:
        if self.matrix_kind == "circulant":
            return self.N * self.coefficients[0]
        return math.fsum(self.diagonal())

    def trace_bbstar(self) -> float:
        """Exact ``Tr(B B*)`` at the current ``N``, from coefficients only."""
        if self.matrix_kind == "circulant":
            return self.N * self.a2
        return math.fsum(self.diagonal() ** 2)

    @property
    def fourth_moment(self) -> float:
        """``E|y|^4`` of the standardized entries."""
        k = self.law.m4 / self.law.sigma**4
        return k if self.field == "real" else 0.5 * (k + 1.0)

    def with_N(self, N: int) -> "QuadFormSpec":
        return QuadFormSpec(self.matrix_kind, N, self.law, self.field, self.symbol,
                            self.symbol_power, self.coefficients)


@dataclass(frozen=True)
class CltVariancePrediction:
    v_sq: float
    a1_sq: float
    a2: float
    fourth_moment: float
    t: int


def clt_variance(spec: QuadFormSpec) -> CltVariancePrediction:
    """Limiting variance ``(E|y|^4 - 1 - t/2) a1^2 + (t/2) a2``.

    Raises
    ------
    ConfigError
        If the prediction is negative, which no admissible ``B`` produces.
    """
    t = spec.t
    m4 = spec.fourth_moment
    v = (m4 - 1.0 - t / 2.0) * spec.a1_sq + (t / 2.0) * spec.a2
    if v < -1e-12:
        raise ConfigError(f"predicted CLT variance is negative ({v}); check the matrix spec")
    return CltVariancePrediction(max(v, 0.0), spec.a1_sq, spec.a2, m4, t)


def quadform_matrix(spec: QuadFormSpec) -> np.ndarray:
    """Dense ``B`` (for checks; the Monte Carlo never builds it)."""
    N = spec.N
    if spec.matrix_kind != "circulant":
        return np.diag(spec.diagonal())
    row = np.zeros(N)
    for k, c in enumerate(spec.coefficients):
        row[k] = c
        row[(N - k) % N] = c
    idx = (np.arange(N)[None, :] - np.arange(N)[:, None]) % N
    return row[idx]


def quadform_stat(Y, B) -> float | complex:
    """``(Y* B Y - Tr B) / sqrt(N)``."""
    y = np.asarray(Y)
    b = np.asarray(B)
    if b.ndim != 2 or b.shape[0] != b.shape[1] or y.shape != (b.shape[0],):
        raise ValueError(f"dimension mismatch: Y {y.shape}, B {b.shape}")
    val = np.vdot(y, b @ y) - np.trace(b)
    val = val / math.sqrt(y.size)
    if np.isrealobj(y) and np.isrealobj(b):
        return float(np.real(val))
    return complex(val)


def quadform_batch(spec: QuadFormSpec, Y: np.ndarray) -> np.ndarray:
    """Centred quadratic form for each row of ``Y``, without forming ``B``.

    Returns ``Y* B Y - Tr B`` (not yet divided by ``sqrt(N)``), real-valued
    because ``B`` is real symmetric.
    """
    a2 = np.abs(Y) ** 2
    if spec.matrix_kind == "identity":
        return a2.sum(axis=1) - spec.N
    if spec.matrix_kind == "diagonal":
        b = spec.diagonal()
        return a2 @ b - math.fsum(b)
    c = spec.coefficients
    out = c[0] * (a2.sum(axis=1) - spec.N)
    for k in range(1, len(c)):
        if c[k] != 0.0:
            out = out + 2.0 * c[k] * np.real(np.sum(np.conj(Y) * np.roll(Y, -k, axis=1), axis=1))
    return out


def _draw(spec: QuadFormSpec, rng: np.random.Generator, rows: int) -> np.ndarray:
    unit = spec.law.scaled(1.0 / spec.law.sigma)
    if spec.field == "real":
        return unit.sample(rng, (rows, spec.N))
    return (unit.sample(rng, (rows, spec.N)) + 1j * unit.sample(rng, (rows, spec.N))) / math.sqrt(2.0)


def _mc_values(spec: QuadFormSpec, reps: int, seed: int) -> np.ndarray:
    # chunk c always uses stream (seed, c), so results do not depend on scheduling
    out = np.empty(reps)
    for c, start in enumerate(range(0, reps, CHUNK)):
        rows = min(CHUNK, reps - start)
        out[start:start + rows] = quadform_batch(spec, _draw(spec, replication_rng(seed, c), rows))
    return out


@dataclass
class QuadFormResult:
    sample_variance: float
    predicted: CltVariancePrediction
    ks_vs_gaussian: TestVerdict | None
    ks_skipped: bool
    summary: Summary
    values: np.ndarray = field(repr=False, default=None)

    @property
    def relative_error(self) -> float:
        v = self.predicted.v_sq
        return abs(self.sample_variance - v) / v if v > 0 else abs(self.sample_variance)


def mc_quadform(spec: QuadFormSpec, reps: int, seed: int, ks_threshold: float | None = None) -> QuadFormResult:
    """Monte Carlo sample of ``(Y* B Y - Tr B)/sqrt(N)``.

    The KS comparison against ``N(0, v^2)`` runs when ``v^2 > 0``; for a
    degenerate prediction it is skipped and flagged.
    """
    if reps < 2:
        raise ConfigError("need at least two replications")
    vals = _mc_values(spec, reps, seed) / math.sqrt(spec.N)
    pred = clt_variance(spec)
    summ = summarize(vals)
    ks = None
    skipped = pred.v_sq <= 0.0
    if not skipped:
        sd = math.sqrt(pred.v_sq)
        thr = 1.0 if ks_threshold is None else ks_threshold
        ks = ks_verdict("ks_vs_gaussian", vals, lambda x: ndtr(x / sd), thr)
    return QuadFormResult(summ.variance, pred, ks, skipped, summ, vals)


def bai_silverstein_ratio(spec: QuadFormSpec, reps: int, seed: int) -> float:
    """Monte Carlo estimate of ``E|Y* B Y - Tr B|^2 / Tr(B B*)``."""
    if reps < 1:
        raise ConfigError("need at least one replication")
    vals = _mc_values(spec, reps, seed)
    return math.fsum(vals**2) / reps / spec.trace_bbstar()
