"""Benchmark CSV loading and aggregation.

The input contract is the benchmark's trial-record schema (v1): one row
per trial with at least the columns each figure needs.  Unknown columns
are ignored; missing required columns are an error.  All aggregation
(means and standard errors per cell) happens here, so the raw trials
remain the single source of truth.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass


class SchemaError(ValueError):
    """Input CSV does not carry the columns a figure requires."""


REQUIRED_COLUMNS = {
    "scaling-comparison": ("experiment", "c_true", "calls_forward", "calls_inverse", "copies_consumed"),
    "estimation-error": ("experiment", "c_true", "abs_error"),
    "noise-heatmap": ("c_true", "p_err", "verdict"),
}

FIGURE_KINDS = tuple(REQUIRED_COLUMNS)


def load_rows(paths, kind: str) -> list[dict]:
    """Read and pool trial rows from every input CSV, checking the schema."""
    required = REQUIRED_COLUMNS[kind]
    rows: list[dict] = []
    for path in paths:
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            header = reader.fieldnames or []
            missing = [c for c in required if c not in header]
            if missing:
                raise SchemaError(f"{path}: missing required columns {missing}")
            rows.extend(reader)
    if not rows:
        raise SchemaError(f"no trial rows found in {list(paths)}")
    return rows


def _mean_stderr(values) -> tuple[float, float]:
    n = len(values)
    mean = sum(values) / n
    if n < 2:
        return mean, 0.0
    var = sum((v - mean) ** 2 for v in values) / (n - 1)
    return mean, math.sqrt(var / n)


@dataclass(frozen=True)
class SeriesPoint:
    x: float
    mean: float
    stderr: float


def aggregate_scaling(rows) -> dict[str, list[SeriesPoint]]:
    """Per-c mean cost for the two detection protocols.

    Baseline cost is the consumed copies; amplified cost is the total
    oracle calls (forward plus inverse).
    """
    buckets: dict[str, dict[float, list[float]]] = {}
    for r in rows:
        exp = r["experiment"]
        if exp == "baseline-scaling":
            cost = float(r["copies_consumed"])
        elif exp == "amplified-scaling":
            cost = float(r["calls_forward"]) + float(r["calls_inverse"])
        else:
            continue
        buckets.setdefault(exp, {}).setdefault(float(r["c_true"]), []).append(cost)
    series = {}
    for exp, cells in buckets.items():
        pts = [SeriesPoint(c, *_mean_stderr(v)) for c, v in sorted(cells.items())]
        series[exp] = pts
    return series


def aggregate_estimation(rows) -> list[SeriesPoint]:
    cells: dict[float, list[float]] = {}
    for r in rows:
        if r.get("abs_error"):
            cells.setdefault(float(r["c_true"]), []).append(float(r["abs_error"]))
    if not cells:
        raise SchemaError("no rows with an abs_error value")
    return [SeriesPoint(c, *_mean_stderr(v)) for c, v in sorted(cells.items())]


@dataclass(frozen=True)
class HeatmapData:
    c_values: list[float]
    p_err_values: list[float]
    success: list[list[float]]  # indexed [p_err][c]


def aggregate_noise(rows) -> HeatmapData:
    """Clean-detection success rate per (c, p_err) cell.

    Only the verdict value "coherent" counts: the benchmark reserves it
    for detections on noise-free trajectories, relabeling noise-tainted
    ones "coherent_noisy".
    """
    cells: dict[tuple[float, float], list[bool]] = {}
    for r in rows:
        if not r.get("p_err"):
            continue
        key = (float(r["c_true"]), float(r["p_err"]))
        cells.setdefault(key, []).append(r["verdict"] == "coherent")
    if not cells:
        raise SchemaError("no rows with a p_err value")
    c_values = sorted({c for c, _ in cells})
    p_values = sorted({p for _, p in cells})
    grid = [
        [
            (sum(cells[(c, p)]) / len(cells[(c, p)])) if (c, p) in cells else math.nan
            for c in c_values
        ]
        for p in p_values
    ]
    return HeatmapData(c_values=c_values, p_err_values=p_values, success=grid)


def fit_loglog_slope(points: list[SeriesPoint]) -> float:
    """Least-squares slope of log(mean) against log(x)."""
    if len(points) < 2:
        raise SchemaError("need at least 2 points for a slope")
    lx = [math.log(p.x) for p in points]
    ly = [math.log(p.mean) for p in points]
    mx = sum(lx) / len(lx)
    my = sum(ly) / len(ly)
    sxx = sum((a - mx) ** 2 for a in lx)
    return sum((a - mx) * (b - my) for a, b in zip(lx, ly)) / sxx
