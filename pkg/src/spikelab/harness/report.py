"""Experiment reports and their JSON form."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from ..stats import TestVerdict

TIMING_KEYS = ("wall_time",)


def cnum(z) -> dict:
    """JSON form of a complex number."""
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def from_cnum(d: dict) -> complex:
    return complex(d["re"], d["im"])


@dataclass
class ExperimentReport:
    """Everything an experiment produced, self-contained.

    ``records`` are per-replication dictionaries ordered by replication
    index; ``predictions`` are the analytic values the verdicts test.
    """

    experiment: str
    config: dict
    records: list
    aggregates: dict
    predictions: dict
    verdicts: list
    master_seed: int
    version: str
    wall_time: float = 0.0
    plot: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts)

    def to_dict(self, timing: bool = True) -> dict:
        d = {
            "experiment": self.experiment,
            "config": self.config,
            "records": self.records,
            "aggregates": self.aggregates,
            "predictions": self.predictions,
            "verdicts": [v.to_dict() for v in self.verdicts],
            "passed": self.passed,
            "master_seed": self.master_seed,
            "version": self.version,
            "plot": [list(p) for p in self.plot],
        }
        if timing:
            d["wall_time"] = self.wall_time
        return d

    def to_json(self, timing: bool = True, indent: int | None = None) -> str:
        """Canonical JSON (sorted keys); ``timing=False`` drops wall-clock fields."""
        return json.dumps(self.to_dict(timing), sort_keys=True, indent=indent, allow_nan=True)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentReport":
        return cls(
            experiment=d["experiment"],
            config=d["config"],
            records=d["records"],
            aggregates=d["aggregates"],
            predictions=d["predictions"],
            verdicts=[TestVerdict.from_dict(v) for v in d["verdicts"]],
            master_seed=d["master_seed"],
            version=d["version"],
            wall_time=d.get("wall_time", 0.0),
            plot=[tuple(p) for p in d.get("plot", [])],
        )

    @classmethod
    def from_json(cls, text: str) -> "ExperimentReport":
        return cls.from_dict(json.loads(text))

    def summary_lines(self) -> list[str]:
        return [v.line() for v in self.verdicts]
