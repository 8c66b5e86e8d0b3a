"""Command-line entry point.

    spikelab <experiment> --config cfg.json [--seed S] [--reps R] [--workers W]
             [--out report.json] [--csv samples.csv] [--tsv plot.tsv]

Exit status is 0 when every verdict passes, 1 when any fails and 2 on a
configuration or usage error.
"""
from __future__ import annotations

import argparse
import sys

from .errors import ConfigError, DomainError, IntervalInsideSupport, InvalidSplit
from .harness import EXPERIMENTS, load_config, resolve_workers, run_experiment, write_csv, write_report, write_tsv

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="spikelab", description="Run a deformed-Wigner verification experiment.")
    p.add_argument("experiment", choices=EXPERIMENTS)
    p.add_argument("--config", required=True, help="JSON experiment config")
    p.add_argument("--seed", type=int, help="master seed (overrides the config)")
    p.add_argument("--reps", type=int, help="number of replications (overrides the config)")
    p.add_argument("--workers", type=int, help="worker processes (default: $SPIKELAB_WORKERS or CPU count)")
    p.add_argument("--out", help="write the JSON report here")
    p.add_argument("--csv", help="write raw samples here")
    p.add_argument("--tsv", help="write plot data here")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.seed is not None and not 0 <= args.seed < 2**64:
            raise ConfigError("--seed must be an unsigned 64-bit integer")
        cfg = load_config(args.config, experiment=args.experiment, seed=args.seed, reps=args.reps)
        workers = resolve_workers(args.workers)
        report = run_experiment(cfg, workers)
    except (ConfigError, DomainError, IntervalInsideSupport, InvalidSplit) as exc:
        print(f"spikelab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    for line in report.summary_lines():
        print(line)
    if not report.verdicts:
        print("(report only: no verdicts for this configuration)")
    if args.out:
        write_report(report, args.out)
    if args.csv:
        write_csv(report, args.csv)
    if args.tsv:
        write_tsv(report, args.tsv)
    return EXIT_PASS if report.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
