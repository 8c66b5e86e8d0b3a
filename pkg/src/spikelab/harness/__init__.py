"""Experiment harness: configuration, replication runner, experiments and reports."""
from .config import DEFAULT_TOLERANCES, EXPERIMENTS, ExperimentConfig, load_config, parse_config
from .experiments import (
    RUNNERS, run_correction, run_esd, run_experiment, run_fluct, run_gaps, run_outliers,
    run_quadform, run_separation,
)
from .io import write_csv, write_report, write_tsv
from .report import ExperimentReport
from .runner import resolve_workers, run_replications

__all__ = [
    "DEFAULT_TOLERANCES", "EXPERIMENTS", "ExperimentConfig", "ExperimentReport", "RUNNERS",
    "load_config", "parse_config", "resolve_workers", "run_replications", "run_experiment",
    "run_outliers", "run_fluct", "run_correction", "run_separation", "run_gaps", "run_esd",
    "run_quadform", "write_csv", "write_report", "write_tsv",
]
