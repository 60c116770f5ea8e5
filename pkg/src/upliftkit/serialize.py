"""Deterministic CSV and JSON writers for the report types.

Undefined values (NaN or infinite) serialize as empty CSV cells and JSON
nulls so that repeated runs are byte-identical and downstream parsers
never see float('nan') literals.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

from .evaluation import QuantileUpliftReport, SegmentReport
from .importance import ImportanceReport
from .ols import OlsSummary
from .segments import GroupCateTable


def clean_json(obj):
    """Recursively replace non-finite floats with None."""
    if isinstance(obj, dict):
        return {key: clean_json(value) for key, value in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean_json(value) for value in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


def write_json(path, payload: dict) -> None:
    text = json.dumps(clean_json(payload), indent=2, sort_keys=True)
    Path(path).write_text(text + "\n", encoding="utf-8")


def _cell(value) -> str:
    if isinstance(value, float):
        if not math.isfinite(value):
            return ""
        return repr(value)
    return str(value)


def write_csv(path, header: list[str], rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])


def write_quantile_report(report: QuantileUpliftReport, directory) -> None:
    directory = Path(directory)
    write_csv(
        directory / "quantile_uplift.csv",
        ["quantile", "mean_uplift", "ci_low", "ci_high", "n_valid_replicates"],
        (
            (r.quantile, r.mean_uplift, r.ci_low, r.ci_high, r.n_valid_replicates)
            for r in report.rows
        ),
    )
    write_json(directory / "quantile_uplift.json", report.to_dict())


def write_importance_report(report: ImportanceReport, directory) -> None:
    directory = Path(directory)
    write_csv(
        directory / "importance.csv",
        ["variable", "score", "ci_low", "ci_high", "n_columns"],
        (
            (e.variable, e.score, e.ci_low, e.ci_high, e.n_columns)
            for e in report.entries
        ),
    )
    write_json(directory / "importance.json", report.to_dict())


def write_segment_report(report: SegmentReport, directory) -> None:
    directory = Path(directory)
    rows = []
    for profile in (report.bottom, report.top):
        for category, proportion in zip(profile.categories, profile.proportions):
            rows.append((profile.segment, profile.variable, category, proportion))
    write_csv(
        directory / f"segments_{report.variable}.csv",
        ["segment", "variable", "category", "proportion"],
        rows,
    )
    write_json(directory / f"segments_{report.variable}.json", report.to_dict())


def write_group_cate_table(table: GroupCateTable, directory) -> None:
    directory = Path(directory)
    write_csv(
        directory / f"group_cate_{table.variable}.csv",
        [
            "category",
            "uplift",
            "n_treated",
            "n_control",
            "mean_treated",
            "mean_control",
        ],
        (
            (
                r.category,
                r.uplift,
                r.n_treated,
                r.n_control,
                r.mean_treated,
                r.mean_control,
            )
            for r in table.rows
        ),
    )
    write_json(directory / f"group_cate_{table.variable}.json", table.to_dict())


def write_ols_summary(summary: OlsSummary, variable: str, directory) -> None:
    directory = Path(directory)
    (directory / f"ols_{variable}.txt").write_text(
        summary.to_text(), encoding="utf-8"
    )
    write_csv(
        directory / f"ols_{variable}.csv",
        ["label", "coef", "std_err", "t", "p"],
        ((c.label, c.coef, c.std_err, c.t, c.p) for c in summary.coefficients),
    )
    write_json(directory / f"ols_{variable}.json", summary.to_dict())
