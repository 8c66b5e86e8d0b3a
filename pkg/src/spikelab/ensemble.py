"""Seeded samplers for deformed Wigner matrices ``M_N = W_N / sqrt(N) + A_N``.

Real field: off-diagonal entries ``xi / sqrt(N)``, diagonal ``sqrt(2) xi / sqrt(N)``.
Complex field: diagonal ``xi / sqrt(N)``, off-diagonal
``(xi_1 + i xi_2) / sqrt(2 N)``.  Every ``xi`` is an independent draw of the
entry law.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analytic import DeformationSpec, EntryLaw, t_parameter

__all__ = [
    "EnsembleConfig",
    "MatrixSample",
    "derive_seed",
    "replication_rng",
    "sample_wigner",
    "apply_deformation",
    "rotation_vectors",
    "sample_standardized_vector",
]

_U64 = (1 << 64) - 1


def derive_seed(master_seed: int, replication_index: int) -> int:
    """64-bit seed of one replication.

    Hashes ``(master_seed, replication_index)`` with numpy's ``SeedSequence``
    so neighbouring indices give unrelated streams.
    """
    ss = np.random.SeedSequence(int(master_seed) & _U64, spawn_key=(int(replication_index),))
    return int(ss.generate_state(1, np.uint64)[0])


def replication_rng(master_seed: int, replication_index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(derive_seed(master_seed, replication_index)))


@dataclass(frozen=True)
class EnsembleConfig:
    """Parameters of a deformed Wigner ensemble."""

    field: str
    N: int
    law: EntryLaw
    deformation: DeformationSpec | None = None
    master_seed: int = 0

    def __post_init__(self):
        t_parameter(self.field)
        if int(self.N) < 1:
            raise ValueError(f"N must be at least 1, got {self.N}")
        if self.deformation is not None:
            self.deformation.check_size(self.N)

    @property
    def sigma(self) -> float:
        return self.law.sigma

    def to_dict(self) -> dict:
        return {
            "field": self.field,
            "N": self.N,
            "entry_law": self.law.to_dict(),
            "deformation": None if self.deformation is None else self.deformation.to_dict(),
            "master_seed": self.master_seed,
        }


@dataclass
class MatrixSample:
    """One draw of ``M_N``.

    ``w11`` is the undeformed, unnormalised entry ``(W_N)_11``.
    """

    matrix: np.ndarray
    w11: float | complex
    replication_index: int
    derived_seed: int


def _wigner(law: EntryLaw, N: int, field: str, rng: np.random.Generator):
    if field == "real":
        xi = law.sample(rng, (N, N))
        w = np.triu(xi, 1)
        w = w + w.T
        w[np.diag_indices(N)] = math.sqrt(2.0) * np.diag(xi)
        return w / math.sqrt(N), float(w[0, 0])
    re = law.sample(rng, (N, N))
    im = law.sample(rng, (N, N))
    upper = np.triu(re + 1j * im, 1) / math.sqrt(2.0)
    w = upper + upper.conj().T
    w[np.diag_indices(N)] = np.diag(re)
    return w / math.sqrt(N), complex(w[0, 0])


def sample_wigner(config: EnsembleConfig, replication_index: int) -> MatrixSample:
    """Draw replication ``replication_index`` of ``M_N``.

    The result depends only on ``(config, replication_index)``.
    """
    seed = derive_seed(config.master_seed, replication_index)
    rng = np.random.Generator(np.random.PCG64(seed))
    x, w11 = _wigner(config.law, config.N, config.field, rng)
    if config.deformation is not None and config.deformation.rank:
        x = apply_deformation(x, config.deformation)
    return MatrixSample(x, w11, int(replication_index), seed)


def rotation_vectors(spec: DeformationSpec, N: int, complex_field: bool) -> np.ndarray:
    """Columns ``Q e_i`` for the spike positions of ``D_N``.

    ``Q`` is the product of ``r`` Householder reflectors ``I - 2 u u*`` with
    Gaussian ``u`` drawn from ``rotation_seed``.  Returns an ``N x r`` array.
    """
    spec.check_size(N)
    rng = np.random.Generator(np.random.PCG64(spec.rotation_seed))
    diag = spec.diagonal_entries(N)
    cols = np.flatnonzero(diag)
    dtype = complex if complex_field else float
    basis = np.zeros((N, cols.size), dtype=dtype)
    basis[cols, np.arange(cols.size)] = 1.0
    for _ in range(max(cols.size, 1)):
        u = rng.standard_normal(N)
        if complex_field:
            u = u + 1j * rng.standard_normal(N)
        u /= np.linalg.norm(u)
        basis -= 2.0 * np.outer(u, u.conj() @ basis)
    return basis


def apply_deformation(x: np.ndarray, spec: DeformationSpec) -> np.ndarray:
    """Return ``x + A_N`` for the deformation described by ``spec``.

    The field (real or complex) is taken from the dtype of ``x``.
    """
    x = np.asarray(x)
    N = x.shape[0]
    spec.check_size(N)
    out = x.copy() if np.issubdtype(x.dtype, np.inexact) else x.astype(float)
    if spec.kind == "diagonal":
        out[np.diag_indices(N)] += spec.diagonal_entries(N)
    elif spec.kind == "full":
        out += spec.full_theta / N
    else:
        vecs = rotation_vectors(spec, N, np.iscomplexobj(out))
        vals = spec.diagonal_entries(N)[np.flatnonzero(spec.diagonal_entries(N))]
        a = (vecs * vals) @ vecs.conj().T
        # symmetrise so the deformed matrix stays exactly self-adjoint
        a = 0.5 * (a + a.conj().T)
        out += a
    return out


def sample_standardized_vector(law: EntryLaw, N: int, field: str, seed) -> np.ndarray:
    """Vector of ``N`` i.i.d. entries with mean 0 and ``E|y|^2 = 1``.

    Complex entries are ``(xi_1 + i xi_2) / sqrt(2)`` so that ``E y^2 = 0``.
    ``seed`` may be an integer or a ``numpy.random.Generator``.
    """
    t_parameter(field)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    unit = law.scaled(1.0 / law.sigma)
    if field == "real":
        return unit.sample(rng, N)
    return (unit.sample(rng, N) + 1j * unit.sample(rng, N)) / math.sqrt(2.0)
