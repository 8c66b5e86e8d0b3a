"""CSV and TSV emission for experiment reports."""
from __future__ import annotations

import csv
from pathlib import Path

from .report import ExperimentReport

FLUCT_COLUMNS = ("rep", "seed", "N", "lambda1", "rescaled")
CORRECTION_COLUMNS = ("N", "reps", "gn_re", "gn_im", "se_re", "se_im")


def fmt(value) -> str:
    """17 significant digits for floats, plain text otherwise."""
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, float):
        return format(value, ".17g")
    if value is None:
        return ""
    return str(value)


def csv_rows(report: ExperimentReport) -> tuple[tuple, list]:
    """Header and rows of the raw-sample CSV for ``report``."""
    if report.experiment == "fluct":
        return FLUCT_COLUMNS, [[r[c] for c in FLUCT_COLUMNS] for r in report.records]
    if report.experiment == "correction":
        rows = [[row["N"], row["reps"], row["gn"]["re"], row["gn"]["im"], row["se_re"], row["se_im"]]
                for row in report.aggregates["per_N"]]
        return CORRECTION_COLUMNS, rows
    if not report.records:
        return (), []
    header = tuple(k for k, v in report.records[0].items() if not isinstance(v, (list, dict)))
    lists = [k for k, v in report.records[0].items() if isinstance(v, list)]
    rows = []
    for r in report.records:
        row = [r[k] for k in header]
        for k in lists:
            row.extend(r[k])
        rows.append(row)
    if lists:
        width = len(report.records[0][lists[0]])
        header = header + tuple(f"{lists[0]}_{j}" for j in range(width))
    return header, rows


def write_csv(report: ExperimentReport, path) -> None:
    header, rows = csv_rows(report)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])


def write_tsv(report: ExperimentReport, path) -> None:
    """Two-column plot data with a ``# x<TAB>y`` header."""
    lines = ["# x\ty"]
    lines.extend(f"{fmt(float(x))}\t{fmt(float(y))}" for x, y in report.plot)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_report(report: ExperimentReport, path) -> None:
    Path(path).write_text(report.to_json(indent=None) + "\n", encoding="utf-8")
