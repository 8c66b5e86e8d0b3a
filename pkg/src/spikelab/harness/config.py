"""Experiment configuration: JSON parsing, defaults and validation."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from ..analytic import DeformationSpec, EntryLaw, FIELDS
from ..ensemble import EnsembleConfig
from ..errors import ConfigError

EXPERIMENTS = ("outliers", "fluct", "correction", "separation", "esd", "quadform", "gaps")

# calibration constants; every key can be overridden in the config's "tolerances" block
DEFAULT_TOLERANCES = {
    "outliers": {"outlier": 0.05, "edge": 0.10, "edge_slack": 0.05},
    "fluct": {"ks": 0.06, "ks_full": 0.08, "var_rel": 0.10, "ks_gauss_min": 0.25},
    "correction": {"bias_rel": 0.20, "se_mult": 3.0, "slope_max": -1.3, "var_ratio_max": 2.0,
                   "se_rel": 0.05},
    "separation": {"min_fraction": 0.99},
    "gaps": {"min_fraction": 0.99},
    "esd": {"w1": 0.05},
    "quadform": {"var_rel": 0.10, "ks": 0.03, "bs_K": 4.0},
}

_TOP_KEYS = {"experiment", "field", "N", "reps", "entry_law", "deformation", "tolerances",
             "experiment_params", "seed"}


@dataclass(frozen=True)
class ExperimentConfig:
    """A validated experiment description.

    ``params`` holds the experiment-specific block and ``tolerances`` the
    verdict thresholds merged over the defaults.
    """

    experiment: str
    field: str
    N: int
    reps: int
    law: EntryLaw
    deformation: DeformationSpec | None
    tolerances: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)
    master_seed: int = 0

    @property
    def sigma(self) -> float:
        return self.law.sigma

    @property
    def spec(self) -> DeformationSpec:
        return self.deformation if self.deformation is not None else DeformationSpec.none()

    def ensemble(self, N: int | None = None) -> EnsembleConfig:
        return EnsembleConfig(self.field, self.N if N is None else N, self.law,
                              self.deformation, self.master_seed)

    def to_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "field": self.field,
            "N": self.N,
            "reps": self.reps,
            "entry_law": self.law.to_dict(),
            "deformation": None if self.deformation is None else self.deformation.to_dict(),
            "tolerances": dict(sorted(self.tolerances.items())),
            "experiment_params": self.params,
            "seed": self.master_seed,
        }

    def replace(self, **changes) -> "ExperimentConfig":
        d = {**self.__dict__, **changes}
        return ExperimentConfig(**d)


def _positive_int(d, key, default=None):
    val = d.get(key, default)
    if val is None:
        raise ConfigError(f"missing required key {key!r}")
    if isinstance(val, bool) or not isinstance(val, int) or val < 1:
        raise ConfigError(f"{key!r} must be a positive integer, got {val!r}")
    return val


def parse_config(d: dict, experiment: str | None = None, seed: int | None = None,
                 reps: int | None = None) -> ExperimentConfig:
    """Build an :class:`ExperimentConfig` from a decoded JSON object.

    ``experiment``, ``seed`` and ``reps`` override the corresponding keys.

    Raises
    ------
    ConfigError
        On unknown keys, missing fields or out-of-range values.
    """
    if not isinstance(d, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(d) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    exp = experiment or d.get("experiment")
    if exp not in EXPERIMENTS:
        raise ConfigError(f"experiment must be one of {EXPERIMENTS}, got {exp!r}")
    if experiment and d.get("experiment") not in (None, experiment):
        raise ConfigError(f"config is for {d['experiment']!r} but {experiment!r} was requested")
    fld = d.get("field", "real")
    if fld not in FIELDS:
        raise ConfigError(f"field must be one of {FIELDS}, got {fld!r}")
    N = _positive_int(d, "N")
    n_reps = reps if reps is not None else d.get("reps")
    if n_reps is None:
        raise ConfigError("missing required key 'reps'")
    n_reps = _positive_int({"reps": n_reps}, "reps")
    try:
        law = EntryLaw.from_dict(d.get("entry_law", {"kind": "gaussian", "sigma": 1.0}))
        deformation = DeformationSpec.from_dict(d["deformation"]) if d.get("deformation") else None
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid entry_law or deformation: {exc}") from exc
    if deformation is not None and deformation.rank > N:
        raise ConfigError(f"deformation rank {deformation.rank} exceeds N = {N}")
    tol = dict(DEFAULT_TOLERANCES[exp])
    user_tol = d.get("tolerances", {}) or {}
    if not isinstance(user_tol, dict):
        raise ConfigError("tolerances must be an object")
    for k, v in user_tol.items():
        if not isinstance(v, (int, float)) or isinstance(v, bool) or not math.isfinite(v):
            raise ConfigError(f"tolerance {k!r} must be a finite number")
        if k not in ("slope_max",) and v <= 0:
            raise ConfigError(f"tolerance {k!r} must be positive")
        tol[k] = float(v)
    params = d.get("experiment_params", {}) or {}
    if not isinstance(params, dict):
        raise ConfigError("experiment_params must be an object")
    s = seed if seed is not None else d.get("seed", 0)
    if isinstance(s, bool) or not isinstance(s, int) or not 0 <= s < 2**64:
        raise ConfigError(f"seed must be an unsigned 64-bit integer, got {s!r}")
    return ExperimentConfig(exp, fld, N, n_reps, law, deformation, tol, params, s)


def load_config(path, **overrides) -> ExperimentConfig:
    """Read and validate a JSON config file."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return parse_config(data, **overrides)
