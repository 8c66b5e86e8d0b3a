"""Empirical-distribution tools: KS tests, Wasserstein-1 to the semicircle,
moment summaries and log-log rate fits."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .analytic import semicircle_cdf
from .errors import DomainError

__all__ = [
    "EmpiricalSample",
    "TestVerdict",
    "Summary",
    "ks_stat",
    "ks_pvalue",
    "ks_verdict",
    "semicircle_quantile",
    "wasserstein1_semicircle",
    "loglog_slope",
    "summarize",
    "fsum_complex",
]


@dataclass(frozen=True)
class EmpiricalSample:
    """Sorted copy of a finite real sample."""

    values: np.ndarray

    def __post_init__(self):
        v = np.sort(np.asarray(self.values, dtype=float).ravel())
        if v.size < 1:
            raise ValueError("an empirical sample needs at least one value")
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return int(self.values.size)

    def ecdf(self, x):
        return np.searchsorted(self.values, x, side="right") / self.n


def _as_sample(sample) -> EmpiricalSample:
    return sample if isinstance(sample, EmpiricalSample) else EmpiricalSample(sample)


@dataclass(frozen=True)
class TestVerdict:
    """Outcome of one check.

    ``passed`` is ``statistic <= threshold`` when ``comparison == '<='`` and
    ``statistic >= threshold`` when ``comparison == '>='``.
    """

    __test__ = False  # keep pytest from collecting this class

    name: str
    statistic: float
    threshold: float
    comparison: str = "<="
    p_value: float | None = None
    detail: str = ""

    def __post_init__(self):
        if self.comparison not in ("<=", ">="):
            raise ValueError(f"comparison must be '<=' or '>=', got {self.comparison!r}")

    @property
    def passed(self) -> bool:
        s, t = float(self.statistic), float(self.threshold)
        if math.isnan(s):
            return False
        return s <= t if self.comparison == "<=" else s >= t

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        p = "" if self.p_value is None else f" p={self.p_value:.3g}"
        return f"[{mark}] {self.name}: {self.statistic:.6g} {self.comparison} {self.threshold:.6g}{p}"

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "statistic": float(self.statistic),
            "threshold": float(self.threshold),
            "comparison": self.comparison,
            "p_value": None if self.p_value is None else float(self.p_value),
            "detail": self.detail,
            "passed": self.passed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TestVerdict":
        return cls(d["name"], d["statistic"], d["threshold"], d["comparison"], d["p_value"], d.get("detail", ""))


def ks_stat(sample, cdf: Callable) -> float:
    """Kolmogorov-Smirnov distance between a sample and a continuous CDF."""
    s = _as_sample(sample)
    f = np.asarray(cdf(s.values), dtype=float)
    i = np.arange(1, s.n + 1)
    return float(max(np.max(i / s.n - f), np.max(f - (i - 1) / s.n)))


def ks_pvalue(d: float, n: int) -> float:
    """Asymptotic Kolmogorov p-value ``P(sqrt(n) D_n > sqrt(n) d)``.

    Sums ``2 sum_k (-1)^(k-1) exp(-2 k^2 n d^2)`` until terms fall below
    ``1e-12``.  For ``sqrt(n) d < 1`` the equivalent theta-function series
    is used, which converges quickly there.
    """
    if not 0.0 <= d <= 1.0:
        raise DomainError(f"KS distance must lie in [0, 1], got {d}")
    lam = math.sqrt(n) * d
    if lam == 0.0:
        return 1.0
    if lam < 1.0:
        acc = 0.0
        k = 1
        while True:
            term = math.exp(-((2 * k - 1) ** 2) * math.pi**2 / (8.0 * lam**2))
            acc += term
            if term < 1e-16:
                break
            k += 1
        p = 1.0 - math.sqrt(2.0 * math.pi) / lam * acc
    else:
        p = 0.0
        k = 1
        while True:
            term = math.exp(-2.0 * k * k * lam * lam)
            p += 2.0 * (-1) ** (k - 1) * term
            if term < 1e-12:
                break
            k += 1
    return min(max(p, 0.0), 1.0)


def ks_verdict(name: str, sample, cdf: Callable, threshold: float, comparison="<=") -> TestVerdict:
    """KS statistic as a verdict; p-value attached only when ``n >= 100``."""
    s = _as_sample(sample)
    d = ks_stat(s, cdf)
    p = ks_pvalue(d, s.n) if s.n >= 100 else None
    return TestVerdict(name, d, threshold, comparison, p)


def semicircle_quantile(p, sigma=1.0, tol=1e-12):
    """Quantile function of the semicircle law by vectorised bisection."""
    p = np.asarray(p, dtype=float)
    if np.any((p < 0) | (p > 1)):
        raise DomainError("probabilities must lie in [0, 1]")
    lo = np.full(p.shape, -2.0 * sigma)
    hi = np.full(p.shape, 2.0 * sigma)
    while np.max(hi - lo, initial=0.0) > tol * sigma:
        mid = 0.5 * (lo + hi)
        below = semicircle_cdf(mid, sigma) < p
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    out = 0.5 * (lo + hi)
    return out if out.ndim else float(out)


def wasserstein1_semicircle(sample, sigma=1.0) -> float:
    """``(1/n) sum |x_(i) - q((i - 1/2)/n)|`` with ``q`` the semicircle quantile."""
    s = _as_sample(sample)
    q = semicircle_quantile((np.arange(1, s.n + 1) - 0.5) / s.n, sigma)
    return math.fsum(np.abs(s.values - q)) / s.n


def loglog_slope(points: Iterable[tuple[float, float]]) -> float:
    """Least-squares slope of ``log err`` against ``log n``."""
    pts = np.asarray(list(points), dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 3:
        raise ValueError("need at least three (n, err) points")
    if np.any(pts <= 0):
        raise DomainError("log-log fit needs positive values")
    slope, _ = np.polyfit(np.log(pts[:, 0]), np.log(pts[:, 1]), 1)
    return float(slope)


@dataclass(frozen=True)
class Summary:
    n: int
    mean: float
    variance: float
    skewness: float
    excess_kurtosis: float
    se_mean: float
    se_variance: float

    def to_dict(self) -> dict:
        return {k: float(v) if k != "n" else int(v) for k, v in self.__dict__.items()}


def summarize(sample) -> Summary:
    """Moments with standard errors.

    The variance is unbiased.  ``se_variance = s^2 sqrt(2/(n-1))`` assumes
    near-normal data.  Sums use ``math.fsum`` so the result does not depend
    on the order of the values.
    """
    x = np.sort(np.asarray(sample, dtype=float).ravel())
    n = x.size
    if n < 2:
        raise ValueError("summarize needs at least two values")
    mean = math.fsum(x) / n
    dev = x - mean
    m2 = math.fsum(dev**2) / n
    var = m2 * n / (n - 1)
    if m2 > 0:
        skew = math.fsum(dev**3) / n / m2**1.5
        kurt = math.fsum(dev**4) / n / m2**2 - 3.0
    else:
        skew = kurt = 0.0
    sd = math.sqrt(var)
    return Summary(n, mean, var, skew, kurt, sd / math.sqrt(n), var * math.sqrt(2.0 / (n - 1)))


def fsum_complex(values) -> complex:
    """Order-independent sum of complex values."""
    v = np.asarray(values, dtype=complex).ravel()
    return complex(math.fsum(v.real), math.fsum(v.imag))
