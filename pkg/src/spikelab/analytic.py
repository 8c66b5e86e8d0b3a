"""Closed-form semicircle and spike calculus.

Everything here is a pure function of its arguments: the Stieltjes transform
of the semicircle law and its inverse, the outlier map ``theta -> rho_theta``,
fluctuation variances, the limiting support of a deformed Wigner spectrum,
the ``1/N`` correction ``L_sigma`` to the mean resolvent trace, and
index-level predictions for the extreme eigenvalues.

Conventions
-----------
``field`` is ``"real"`` (symmetric Wigner matrices, ``t = 4``) or
``"complex"`` (Hermitian Wigner matrices, ``t = 2``).  ``sigma`` is the
standard deviation of the entry law, so the semicircle is supported on
``[-2 sigma, 2 sigma]``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Callable, NamedTuple, Sequence

import numpy as np
from scipy.special import ndtr

from .errors import DomainError, IntervalInsideSupport, InvalidSplit, OutsideOutlierRegime

__all__ = [
    "FIELDS",
    "EntryLaw",
    "DeformationSpec",
    "SupportSet",
    "SpikePrediction",
    "PredictionEntry",
    "SeparationPlan",
    "FluctuationTarget",
    "t_parameter",
    "semicircle_pdf",
    "semicircle_cdf",
    "semicircle_expect",
    "resolvent_second_moment",
    "g_sc",
    "g_sc_derivative",
    "z_sigma",
    "rho",
    "sigma_theta",
    "v_theta",
    "support_set",
    "predict_limits",
    "separation_plan",
    "E_sigma",
    "L_sigma",
    "fluctuation_target",
]

FIELDS = ("real", "complex")


def t_parameter(field: str) -> int:
    """Return ``t = 4`` for the real field and ``t = 2`` for the complex one."""
    if field == "real":
        return 4
    if field == "complex":
        return 2
    raise ValueError(f"field must be 'real' or 'complex', got {field!r}")


def _check_sigma(sigma):
    if not sigma > 0:
        raise DomainError(f"sigma must be positive, got {sigma!r}")


# ---------------------------------------------------------------------------
# Entry laws and deformations
# ---------------------------------------------------------------------------

_LAW_KINDS = ("gaussian", "rademacher", "uniform", "discrete")


@dataclass(frozen=True)
class EntryLaw:
    """Symmetric law of a Wigner entry, normalised to variance ``sigma**2``.

    Use the constructors :meth:`gaussian`, :meth:`rademacher`,
    :meth:`uniform` and :meth:`discrete` rather than the raw initialiser.

    Parameters
    ----------
    kind : {'gaussian', 'rademacher', 'uniform', 'discrete'}
    sigma : float
        Standard deviation.
    atoms : tuple of (magnitude, weight)
        Only for ``kind='discrete'``: the law puts mass ``weight/2`` on each
        of ``+-magnitude``.  Magnitudes are relative; they are rescaled so the
        variance is exactly ``sigma**2``.
    """

    kind: str
    sigma: float = 1.0
    atoms: tuple = ()

    def __post_init__(self):
        if self.kind not in _LAW_KINDS:
            raise ValueError(f"unknown entry law {self.kind!r}; expected one of {_LAW_KINDS}")
        _check_sigma(self.sigma)
        if self.kind == "discrete":
            if not self.atoms:
                raise ValueError("discrete law needs at least one atom")
            mags = np.array([a for a, _ in self.atoms], dtype=float)
            wts = np.array([w for _, w in self.atoms], dtype=float)
            if np.any(mags <= 0) or np.any(wts <= 0):
                raise ValueError("atom magnitudes and weights must be positive")
            wts = wts / wts.sum()
            scale = self.sigma / math.sqrt(float(np.dot(wts, mags**2)))
            object.__setattr__(self, "atoms", tuple(zip((mags * scale).tolist(), wts.tolist())))
        elif self.atoms:
            raise ValueError(f"atoms only apply to discrete laws, not {self.kind!r}")

    @classmethod
    def gaussian(cls, sigma=1.0):
        return cls("gaussian", float(sigma))

    @classmethod
    def rademacher(cls, sigma=1.0):
        return cls("rademacher", float(sigma))

    @classmethod
    def uniform(cls, sigma=1.0):
        """Uniform law on ``[-sqrt(3) sigma, sqrt(3) sigma]``."""
        return cls("uniform", float(sigma))

    @classmethod
    def discrete(cls, atoms: Sequence[tuple[float, float]], sigma=1.0):
        return cls("discrete", float(sigma), tuple((float(a), float(w)) for a, w in atoms))

    @property
    def variance(self) -> float:
        return self.sigma**2

    @property
    def m4(self) -> float:
        """Fourth moment ``E xi**4``."""
        s4 = self.sigma**4
        if self.kind == "gaussian":
            return 3.0 * s4
        if self.kind == "rademacher":
            return s4
        if self.kind == "uniform":
            return 1.8 * s4
        return math.fsum(w * a**4 for a, w in self.atoms)

    @property
    def kappa4(self) -> float:
        """Fourth cumulant ``m4 - 3 sigma**4``."""
        return self.m4 - 3.0 * self.sigma**4

    @property
    def is_discrete(self) -> bool:
        return self.kind in ("rademacher", "discrete")

    def point_masses(self):
        """Return ``(values, probabilities)`` of a discrete law, sorted ascending."""
        if self.kind == "rademacher":
            return np.array([-self.sigma, self.sigma]), np.array([0.5, 0.5])
        if self.kind == "discrete":
            mags = np.array([a for a, _ in self.atoms])
            wts = np.array([w for _, w in self.atoms])
            vals = np.concatenate([-mags[::-1], mags])
            probs = np.concatenate([wts[::-1], wts]) / 2.0
            return vals, probs
        raise TypeError(f"{self.kind} law has no point masses")

    def scaled(self, c: float) -> "EntryLaw":
        """Law of ``c * xi`` for ``c > 0``."""
        if not c > 0:
            raise ValueError("scale factor must be positive")
        if self.kind == "discrete":
            return EntryLaw("discrete", self.sigma * c, self.atoms)
        return EntryLaw(self.kind, self.sigma * c)

    def sample(self, rng: np.random.Generator, size) -> np.ndarray:
        """Draw i.i.d. variates with shape ``size``."""
        s = self.sigma
        if self.kind == "gaussian":
            return rng.standard_normal(size) * s
        if self.kind == "rademacher":
            return (2.0 * rng.integers(0, 2, size=size, dtype=np.int8) - 1.0) * s
        if self.kind == "uniform":
            a = math.sqrt(3.0) * s
            return rng.uniform(-a, a, size)
        vals, probs = self.point_masses()
        return rng.choice(vals, size=size, p=probs)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        s = self.sigma
        if self.kind == "gaussian":
            return ndtr(x / s)
        if self.kind == "uniform":
            a = math.sqrt(3.0) * s
            return np.clip((x + a) / (2.0 * a), 0.0, 1.0)
        vals, probs = self.point_masses()
        cum = np.cumsum(probs)
        idx = np.searchsorted(vals, x, side="right")
        return np.where(idx > 0, cum[np.maximum(idx - 1, 0)], 0.0)

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "sigma": self.sigma}
        if self.kind == "discrete":
            d["atoms"] = [list(a) for a in self.atoms]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "EntryLaw":
        kind = d["kind"]
        sigma = float(d.get("sigma", 1.0))
        if kind == "discrete":
            return cls.discrete([tuple(a) for a in d["atoms"]], sigma)
        return cls(kind, sigma)


_DEFORMATION_KINDS = ("diagonal", "full", "rotated")


@dataclass(frozen=True)
class DeformationSpec:
    """Finite-rank deterministic perturbation ``A_N``.

    ``spikes`` lists the distinct non-zero eigenvalues ``theta_j`` with their
    multiplicities ``k_j``, strictly decreasing in ``theta``.  For the
    ``full`` kind (every entry equal to ``theta/N``) the single spike is
    ``(full_theta, 1)``.
    """

    kind: str
    spikes: tuple = ()
    rotation_seed: int = 0
    full_theta: float | None = None

    def __post_init__(self):
        if self.kind not in _DEFORMATION_KINDS:
            raise ValueError(f"unknown deformation kind {self.kind!r}")
        if self.kind == "full":
            if self.full_theta is None or self.full_theta == 0:
                raise ValueError("full deformation needs a non-zero theta")
            object.__setattr__(self, "spikes", ((float(self.full_theta), 1),))
        spikes = tuple((float(t), int(k)) for t, k in self.spikes)
        for t, k in spikes:
            if t == 0 or not math.isfinite(t):
                raise ValueError(f"spike values must be finite and non-zero, got {t}")
            if k < 1:
                raise ValueError(f"spike multiplicity must be positive, got {k}")
        thetas = [t for t, _ in spikes]
        if any(a <= b for a, b in zip(thetas, thetas[1:])):
            raise ValueError("spikes must be strictly decreasing in theta")
        object.__setattr__(self, "spikes", spikes)

    @classmethod
    def diagonal(cls, spikes):
        return cls("diagonal", tuple(spikes))

    @classmethod
    def full(cls, theta):
        return cls("full", full_theta=float(theta))

    @classmethod
    def rotated(cls, spikes, rotation_seed=0):
        return cls("rotated", tuple(spikes), rotation_seed=int(rotation_seed))

    @classmethod
    def none(cls):
        return cls("diagonal", ())

    @property
    def rank(self) -> int:
        return sum(k for _, k in self.spikes)

    @property
    def thetas(self) -> list[float]:
        return [t for t, _ in self.spikes]

    def check_size(self, N: int):
        if self.rank > N:
            raise ValueError(f"deformation rank {self.rank} exceeds matrix size {N}")

    def diagonal_entries(self, N: int) -> np.ndarray:
        """Diagonal of ``D_N``: positive spikes, then ``N - r`` zeros, then negative spikes."""
        self.check_size(N)
        d = np.zeros(N)
        pos = 0
        for t, k in self.spikes:
            if t > 0:
                d[pos:pos + k] = t
                pos += k
        tail = N - sum(k for t, k in self.spikes if t < 0)
        for t, k in self.spikes:
            if t < 0:
                d[tail:tail + k] = t
                tail += k
        return d

    def eigenvalues(self, N: int) -> np.ndarray:
        """Spectrum of ``A_N`` sorted in decreasing order (zeros included)."""
        return np.sort(self.diagonal_entries(N))[::-1]

    def to_dict(self) -> dict:
        if self.kind == "full":
            return {"kind": "full", "theta": self.full_theta}
        d = {"kind": self.kind, "spikes": [[t, k] for t, k in self.spikes]}
        if self.kind == "rotated":
            d["rotation_seed"] = self.rotation_seed
        return d

    @classmethod
    def from_dict(cls, d: dict | None) -> "DeformationSpec":
        if not d:
            return cls.none()
        kind = d.get("kind", "diagonal")
        if kind == "full":
            return cls.full(d["theta"])
        spikes = [tuple(s) for s in d.get("spikes", [])]
        if kind == "rotated":
            return cls.rotated(spikes, d.get("rotation_seed", 0))
        return cls.diagonal(spikes)


# ---------------------------------------------------------------------------
# Semicircle law
# ---------------------------------------------------------------------------

def semicircle_pdf(x, sigma=1.0):
    """Density ``sqrt(4 sigma^2 - x^2) / (2 pi sigma^2)`` on ``[-2 sigma, 2 sigma]``."""
    _check_sigma(sigma)
    x = np.asarray(x, dtype=float)
    inside = np.clip(4.0 * sigma**2 - x**2, 0.0, None)
    out = np.sqrt(inside) / (2.0 * math.pi * sigma**2)
    return out if out.ndim else float(out)


def semicircle_cdf(x, sigma=1.0):
    """Closed-form distribution function of the semicircle law."""
    _check_sigma(sigma)
    x = np.asarray(x, dtype=float)
    u = np.clip(x / (2.0 * sigma), -1.0, 1.0)
    out = 0.5 + (u * np.sqrt(1.0 - u**2) + np.arcsin(u)) / math.pi
    out = np.where(x <= -2.0 * sigma, 0.0, np.where(x >= 2.0 * sigma, 1.0, out))
    return out if out.ndim else float(out)


_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _gauss_legendre(n: int):
    if n not in _GL_CACHE:
        _GL_CACHE[n] = np.polynomial.legendre.leggauss(n)
    return _GL_CACHE[n]


def semicircle_expect(f: Callable, sigma=1.0, tol=1e-10, n0=64, n_max=8192):
    """``E f(s)`` for ``s`` semicircular with variance ``sigma**2``.

    Uses Gauss-Legendre on the substitution ``s = 2 sigma sin(u)``, which
    turns the density into ``(2/pi) cos(u)**2 du`` and removes the square-root
    endpoint singularity.  The node count doubles until two successive
    estimates agree to ``tol``.
    """
    _check_sigma(sigma)
    prev = None
    n = n0
    while n <= n_max:
        nodes, weights = _gauss_legendre(n)
        u = 0.5 * math.pi * nodes
        vals = f(2.0 * sigma * np.sin(u)) * np.cos(u) ** 2
        est = np.sum(weights * vals) * 0.5 * math.pi * (2.0 / math.pi)
        if prev is not None and abs(est - prev) <= tol * max(1.0, abs(est)):
            return est
        prev = est
        n *= 2
    return prev


def resolvent_second_moment(z, sigma=1.0, tol=1e-10):
    """``E[(z - s)**-2]`` by quadrature against the semicircle density."""
    z = complex(z)
    if z.imag == 0 and abs(z.real) <= 2 * sigma:
        raise DomainError("z must avoid the support [-2 sigma, 2 sigma]")
    return complex(semicircle_expect(lambda s: 1.0 / (z - s) ** 2, sigma, tol))


# ---------------------------------------------------------------------------
# Stieltjes transform
# ---------------------------------------------------------------------------

def g_sc(z, sigma=1.0):
    """Stieltjes transform ``E[(z - s)^-1]`` of the semicircle law.

    Accepts scalars or arrays.  Real arguments must satisfy
    ``|x| > 2 sigma`` and return real values; complex arguments return the
    root of ``sigma^2 g^2 - z g + 1 = 0`` with ``Im g * Im z < 0``.
    """
    _check_sigma(sigma)
    arr = np.asarray(z)
    scalar = arr.ndim == 0
    if np.iscomplexobj(arr):
        on_axis = arr.imag == 0
        if np.any(on_axis & (np.abs(arr.real) <= 2 * sigma)):
            raise DomainError("g_sc is undefined on the support [-2 sigma, 2 sigma]")
        # principal roots: the product is analytic off [-2 sigma, 2 sigma] and ~ z at infinity
        r = np.sqrt(arr - 2 * sigma) * np.sqrt(arr + 2 * sigma)
        out = 2.0 / (arr + r)
        return complex(out) if scalar else out
    x = arr.astype(float)
    if np.any(np.abs(x) <= 2 * sigma):
        raise DomainError("g_sc is undefined on the support [-2 sigma, 2 sigma]")
    out = np.sign(x) * 2.0 / (np.abs(x) + np.sqrt(x**2 - 4 * sigma**2))
    return float(out) if scalar else out


def g_sc_derivative(z, sigma=1.0):
    """Derivative of :func:`g_sc`, ``g' = g^2 / (sigma^2 g^2 - 1)``."""
    g = g_sc(z, sigma)
    return g**2 / (sigma**2 * g**2 - 1.0)


def z_sigma(g, sigma=1.0):
    """Inverse of :func:`g_sc` on its image: ``1/g + sigma^2 g``."""
    _check_sigma(sigma)
    arr = np.asarray(g)
    if np.any(arr == 0):
        raise DomainError("z_sigma is undefined at g = 0")
    out = 1.0 / arr + sigma**2 * arr
    if arr.ndim == 0:
        return complex(out) if np.iscomplexobj(out) else float(out)
    return out


def _check_outlier(theta, sigma):
    _check_sigma(sigma)
    if not abs(theta) > sigma:
        raise OutsideOutlierRegime(
            f"|theta| = {abs(theta)} does not exceed sigma = {sigma}; "
            f"the limit is the edge {math.copysign(2 * sigma, theta)}"
        )


def rho(theta, sigma=1.0) -> float:
    """Outlier location ``theta + sigma^2 / theta`` for ``|theta| > sigma``."""
    _check_outlier(theta, sigma)
    return theta + sigma**2 / theta


def sigma_theta(theta, sigma=1.0) -> float:
    """``sigma * sqrt(1 - sigma^2 / theta^2)``."""
    _check_outlier(theta, sigma)
    return sigma * math.sqrt(1.0 - sigma**2 / theta**2)


def v_theta(law: EntryLaw, theta, field="real") -> float:
    """Variance of the Gaussian part of the largest-eigenvalue fluctuation law."""
    t = t_parameter(field)
    s = law.sigma
    _check_outlier(theta, s)
    return (t / 4.0) * (law.m4 - 3.0 * s**4) / theta**2 + (t / 2.0) * s**4 / (theta**2 - s**2)


# ---------------------------------------------------------------------------
# Support of the limiting spectrum
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SupportSet:
    """``K_sigma``: bulk ``[-2 sigma, 2 sigma]`` plus isolated outlier points.

    ``epsilon`` widens every component to ``[c - epsilon, c + epsilon]``.
    """

    bottom_outliers: tuple
    bulk: tuple
    top_outliers: tuple
    epsilon: float = 0.0

    def components(self) -> list[tuple[float, float]]:
        """Closed components in increasing order, each widened by ``epsilon``."""
        e = self.epsilon
        comps = [(p - e, p + e) for p in self.bottom_outliers]
        comps.append((self.bulk[0] - e, self.bulk[1] + e))
        comps.extend((p - e, p + e) for p in self.top_outliers)
        return comps

    def contains(self, x: float) -> bool:
        return any(lo <= x <= hi for lo, hi in self.components())

    def intersects(self, a: float, b: float) -> bool:
        """Whether the closed interval ``[a, b]`` meets the set."""
        return any(lo <= b and a <= hi for lo, hi in self.components())

    @property
    def is_separated(self) -> bool:
        """True when the widened components are pairwise disjoint."""
        comps = self.components()
        return all(c1[1] < c2[0] for c1, c2 in zip(comps, comps[1:]))

    def forbidden_gaps(self, truncate: float | None = None) -> list[tuple[float, float]]:
        """Open intervals of the complement, from ``-inf`` to ``+inf``.

        With ``truncate`` the two unbounded tails are cut at ``-truncate`` and
        ``+truncate``.
        """
        comps = self.components()
        lo_end = -math.inf if truncate is None else -float(truncate)
        hi_end = math.inf if truncate is None else float(truncate)
        edges = [lo_end]
        for lo, hi in comps:
            edges.extend((lo, hi))
        edges.append(hi_end)
        return [(edges[i], edges[i + 1]) for i in range(0, len(edges), 2)]


def support_set(spec: DeformationSpec, sigma=1.0, epsilon=0.0) -> SupportSet:
    """Limiting support of a deformed Wigner spectrum.

    Spikes with ``|theta| <= sigma`` contribute nothing; every other spike
    adds the point ``rho(theta)``.
    """
    _check_sigma(sigma)
    if epsilon < 0:
        raise ValueError("epsilon must be non-negative")
    top = sorted(rho(t, sigma) for t in spec.thetas if t > sigma)
    bottom = sorted(rho(t, sigma) for t in spec.thetas if t < -sigma)
    return SupportSet(tuple(bottom), (-2.0 * sigma, 2.0 * sigma), tuple(top), float(epsilon))


# ---------------------------------------------------------------------------
# Index-level limits and exact separation
# ---------------------------------------------------------------------------

class PredictionEntry(NamedTuple):
    first: int
    last: int
    limit: float
    kind: str


@dataclass(frozen=True)
class SpikePrediction:
    """Almost-sure limits of ordered eigenvalues, indices 1-based inclusive.

    ``kind`` is one of ``top-outlier``, ``top-edge``, ``bottom-edge``,
    ``bottom-outlier``.
    """

    entries: tuple
    N: int

    def limit_of(self, index: int) -> float | None:
        for e in self.entries:
            if e.first <= index <= e.last:
                return e.limit
        return None

    def as_dict(self) -> dict[int, float]:
        """Map every covered index to its limit."""
        return {i: e.limit for e in self.entries for i in range(e.first, e.last + 1)}

    def indices(self) -> list[int]:
        return sorted(self.as_dict())


def predict_limits(spec: DeformationSpec, sigma=1.0, N: int = 1) -> SpikePrediction:
    """Limits of the extreme ordered eigenvalues of ``X_N + A_N``.

    The zero eigenvalue of ``A_N`` is given multiplicity ``N - r`` inside the
    index sums, so the bottom outliers occupy the last indices ``<= N``.
    """
    _check_sigma(sigma)
    spec.check_size(N)
    entries = []
    idx = 0
    for t, k in spec.spikes:
        if t > sigma:
            entries.append(PredictionEntry(idx + 1, idx + k, rho(t, sigma), "top-outlier"))
            idx += k
    top_edge = idx + 1
    bottom = []
    tail = N
    for t, k in reversed(spec.spikes):
        if t < -sigma:
            bottom.append(PredictionEntry(tail - k + 1, tail, rho(t, sigma), "bottom-outlier"))
            tail -= k
    bottom_edge = tail
    if top_edge <= bottom_edge:
        entries.append(PredictionEntry(top_edge, top_edge, 2.0 * sigma, "top-edge"))
        if bottom_edge > top_edge:
            entries.append(PredictionEntry(bottom_edge, bottom_edge, -2.0 * sigma, "bottom-edge"))
    entries.extend(reversed(bottom))
    return SpikePrediction(tuple(entries), N)


class SeparationPlan(NamedTuple):
    i_N: int
    a_prime: float
    b_prime: float


def separation_plan(a, b, spec: DeformationSpec, sigma=1.0, N: int = 1) -> SeparationPlan:
    """Map a gap ``[a, b]`` of the limiting support onto the spectrum of ``A_N``.

    Returns ``i_N``, the number of eigenvalues of ``A_N`` (zeros counted with
    multiplicity ``N - r``) above ``b' = 1/g(b)``, together with
    ``a' = 1/g(a)`` and ``b'``.

    Raises
    ------
    IntervalInsideSupport
        If ``[a, b]`` meets ``K_sigma``.
    InvalidSplit
        If some eigenvalue of ``A_N`` lies in ``[a', b']``.
    """
    if not a < b:
        raise ValueError(f"need a < b, got [{a}, {b}]")
    spec.check_size(N)
    support = support_set(spec, sigma, 0.0)
    if support.intersects(a, b):
        raise IntervalInsideSupport(f"[{a}, {b}] meets the limiting support {support.components()}")
    a_prime = 1.0 / g_sc(float(a), sigma)
    b_prime = 1.0 / g_sc(float(b), sigma)
    eig_a = spec.eigenvalues(N)
    inside = eig_a[(eig_a >= a_prime) & (eig_a <= b_prime)]
    if inside.size:
        raise InvalidSplit(f"eigenvalue {inside[0]} of A_N lies in [{a_prime}, {b_prime}]")
    i_N = int(np.count_nonzero(eig_a > b_prime))
    return SeparationPlan(i_N, float(a_prime), float(b_prime))


# ---------------------------------------------------------------------------
# Master-equation correction
# ---------------------------------------------------------------------------

def _require_off_axis(z, sigma):
    # real z is accepted outside the bulk as the boundary value from Im z > 0
    z = complex(z)
    if z.imag == 0 and abs(z.real) <= 2 * sigma:
        raise DomainError("the correction terms are undefined on [-2 sigma, 2 sigma]")
    return z


def E_sigma(z, spec: DeformationSpec, law: EntryLaw, sigma=None, field="complex"):
    """Order-``1/N`` defect ``E_sigma(z)`` of the master equation.

    ``sum_j k_j theta_j / (1/g - theta_j) + (t/4) kappa4 g^4``, where
    ``1/g = z - sigma^2 g``.  The real field adds ``sigma^2 E[(z - s)^-2]``.
    """
    sigma = law.sigma if sigma is None else sigma
    z = _require_off_axis(z, sigma)
    t = t_parameter(field)
    g = g_sc(z, sigma)
    inv_g = 1.0 / g
    if any(inv_g == th for th in spec.thetas):
        raise DomainError(f"z = {z} is the outlier location of a spike; E_sigma has a pole there")
    total = sum(k * th / (inv_g - th) for th, k in spec.spikes)
    total += (t / 4.0) * law.kappa4 * g**4
    if field == "real":
        total += sigma**2 * resolvent_second_moment(z, sigma)
    return complex(total)


def L_sigma(z, spec: DeformationSpec, law: EntryLaw, sigma=None, field="complex"):
    """``1/N`` coefficient of ``g_N(z) - g_sigma(z)``.

    ``L_sigma(z) = g(z)^-1 E[(z - s)^-2] E_sigma(z)`` with the middle factor
    computed by quadrature.
    """
    sigma = law.sigma if sigma is None else sigma
    z = _require_off_axis(z, sigma)
    g = g_sc(z, sigma)
    m2 = resolvent_second_moment(z, sigma)
    return complex(m2 / g * E_sigma(z, spec, law, sigma, field))


# ---------------------------------------------------------------------------
# Fluctuation law of the largest eigenvalue
# ---------------------------------------------------------------------------

_N_QUAD = 64


@dataclass(frozen=True)
class FluctuationTarget:
    """Law of ``scale_c * (W + sqrt(gaussian_variance) * Z)``.

    ``W`` follows ``base_law`` (the law of the (1,1) Wigner entry) and ``Z``
    is an independent standard normal.
    """

    scale_c: float
    base_law: EntryLaw
    gaussian_variance: float
    field: str
    theta: float = dc_field(default=math.nan)

    @property
    def variance(self) -> float:
        return self.scale_c**2 * (self.base_law.variance + self.gaussian_variance)

    def _mixture(self, y, kernel):
        sd = math.sqrt(self.gaussian_variance)
        law = self.base_law
        y = np.asarray(y, dtype=float)
        if law.kind == "gaussian":
            tot = math.sqrt(law.variance + self.gaussian_variance)
            return kernel(y, 0.0, tot)
        if law.is_discrete:
            vals, probs = law.point_masses()
            out = np.zeros_like(y)
            for v, p in zip(vals, probs):
                out = out + p * kernel(y, v, sd)
            return out
        # uniform base: Gauss-Legendre over the support of W
        half = math.sqrt(3.0) * law.sigma
        nodes, weights = _gauss_legendre(_N_QUAD)
        out = np.zeros_like(y)
        for w_node, w in zip(nodes * half, weights):
            out = out + 0.5 * w * kernel(y, w_node, sd)
        return out

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        out = self._mixture(x / self.scale_c, lambda y, m, s: ndtr((y - m) / s))
        return out if out.ndim else float(out)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        norm = 1.0 / math.sqrt(2.0 * math.pi)

        def kern(y, m, s):
            return norm * np.exp(-0.5 * ((y - m) / s) ** 2) / s

        out = self._mixture(x / self.scale_c, kern) / self.scale_c
        return out if out.ndim else float(out)

    def sample(self, rng: np.random.Generator, size) -> np.ndarray:
        w = self.base_law.sample(rng, size)
        return self.scale_c * (w + math.sqrt(self.gaussian_variance) * rng.standard_normal(size))


def fluctuation_target(law: EntryLaw, theta, sigma=None, field="real") -> FluctuationTarget:
    """Limit law of ``sqrt(N) (lambda_1 - rho_theta)`` for a diagonal rank-one spike.

    In the real field the (1,1) entry of the Wigner matrix is ``sqrt(2)``
    times a draw of ``law``; in the complex field it is a draw of ``law``.
    """
    sigma = law.sigma if sigma is None else sigma
    _check_outlier(theta, sigma)
    t_parameter(field)
    base = law.scaled(math.sqrt(2.0)) if field == "real" else law
    return FluctuationTarget(
        scale_c=1.0 - sigma**2 / theta**2,
        base_law=base,
        gaussian_variance=v_theta(law, theta, field),
        field=field,
        theta=float(theta),
    )
