"""Figure rendering: a pure function of the input CSVs.

Fixed figure size, font setup, and hash salt keep the output bytes
identical across reruns of the same input.  SVG date metadata is
suppressed for the same reason.  PNG or SVG is chosen by the output
extension.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "ampcoh-plots"

import matplotlib.pyplot as plt
import numpy as np

from .records import (
    FIGURE_KINDS,
    SchemaError,
    aggregate_estimation,
    aggregate_noise,
    aggregate_scaling,
    fit_loglog_slope,
    load_rows,
)

FIGSIZE = (6.4, 4.6)
DPI = 150

SERIES_STYLE = {
    "baseline-scaling": dict(color="tab:blue", marker="*", label="state copies (baseline)"),
    "amplified-scaling": dict(color="tab:orange", marker="D", label="oracle calls (amplified)"),
}

REFERENCE_SLOPES = {"baseline-scaling": -1.0, "amplified-scaling": -0.5}


@dataclass(frozen=True)
class PlotSpec:
    inputs: tuple
    kind: str
    out: str
    xlabel: str = ""
    ylabel: str = ""

    def __post_init__(self):
        if self.kind not in FIGURE_KINDS:
            raise ValueError(f"figure kind must be one of {FIGURE_KINDS}, got {self.kind!r}")
        if not self.inputs:
            raise ValueError("at least one input CSV is required")


def _save(fig, out: str) -> None:
    kwargs = {"dpi": DPI}
    if out.lower().endswith(".svg"):
        kwargs["metadata"] = {"Date": None}
    elif not out.lower().endswith(".png"):
        raise ValueError(f"output extension must be .png or .svg, got {out!r}")
    fig.savefig(out, **kwargs)
    plt.close(fig)


def _scaling_figure(spec: PlotSpec):
    rows = load_rows(spec.inputs, spec.kind)
    series = aggregate_scaling(rows)
    if not series:
        raise SchemaError("no baseline-scaling or amplified-scaling rows in the inputs")
    for name, pts in series.items():
        if len({p.x for p in pts}) < 2:
            raise SchemaError(f"{name}: need at least 2 distinct c values, got {len(pts)}")

    fig, ax = plt.subplots(figsize=FIGSIZE)
    for name in ("baseline-scaling", "amplified-scaling"):
        pts = series.get(name)
        if not pts:
            continue
        xs = np.array([p.x for p in pts])
        ys = np.array([p.mean for p in pts])
        errs = np.array([p.stderr for p in pts])
        slope = fit_loglog_slope(pts)
        style = SERIES_STYLE[name]
        ax.errorbar(
            xs, ys, yerr=errs, linestyle="-", markersize=7,
            label=f"{style['label']}, slope {slope:+.2f}",
            color=style["color"], marker=style["marker"],
        )
        # dashed reference line with the ideal exponent, anchored at the
        # smallest c so the guide hugs the data
        ref = REFERENCE_SLOPES[name]
        anchor_x, anchor_y = xs[0], ys[0]
        ax.plot(
            xs, anchor_y * (xs / anchor_x) ** ref, linestyle="--", linewidth=1,
            color=style["color"], alpha=0.6, label=f"reference slope {ref:+.1f}",
        )
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel(spec.xlabel or "geometric coherence c")
    ax.set_ylabel(spec.ylabel or "mean cost to detect")
    ax.legend(fontsize=8)
    ax.grid(True, which="both", alpha=0.25)
    fig.tight_layout()
    return fig


def _estimation_figure(spec: PlotSpec):
    rows = load_rows(spec.inputs, spec.kind)
    pts = aggregate_estimation(rows)
    fig, ax = plt.subplots(figsize=FIGSIZE)
    xs = [p.x for p in pts]
    ys = [p.mean for p in pts]
    errs = [p.stderr for p in pts]
    ax.errorbar(xs, ys, yerr=errs, marker="o", color="tab:green")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel(spec.xlabel or "geometric coherence c")
    ax.set_ylabel(spec.ylabel or "mean |estimate - c_k|")
    ax.grid(True, which="both", alpha=0.25)
    fig.tight_layout()
    return fig


def _edges(values: list[float], floor_ratio: float = 4.0) -> np.ndarray:
    # Geometric cell edges for log-spaced heatmap axes; zeros are floored
    # to a fraction of the smallest positive value so they stay drawable.
    positive = [v for v in values if v > 0]
    floor = min(positive) / floor_ratio if positive else 1e-6
    vals = np.array([max(v, floor) for v in values])
    inner = np.sqrt(vals[:-1] * vals[1:])
    first = vals[0] ** 2 / inner[0] if len(inner) else vals[0] / 2
    last = vals[-1] ** 2 / inner[-1] if len(inner) else vals[-1] * 2
    return np.concatenate([[first], inner, [last]])


def _noise_figure(spec: PlotSpec):
    rows = load_rows(spec.inputs, spec.kind)
    data = aggregate_noise(rows)
    fig, ax = plt.subplots(figsize=FIGSIZE)
    x_edges = _edges(data.c_values)
    y_edges = _edges(data.p_err_values)
    mesh = ax.pcolormesh(
        x_edges, y_edges, np.array(data.success), cmap="viridis", vmin=0.0, vmax=1.0
    )
    fig.colorbar(mesh, ax=ax, label="clean detection success rate")
    # the p_err = sqrt(c) threshold separating gentle from fatal noise
    cs = np.geomspace(x_edges[0], x_edges[-1], 64)
    ax.plot(cs, np.sqrt(cs), color="white", linestyle="--", linewidth=1.5,
            label="p_err = sqrt(c)")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlim(x_edges[0], x_edges[-1])
    ax.set_ylim(y_edges[0], y_edges[-1])
    positive = [v for v in data.p_err_values if v > 0]
    if 0.0 in data.p_err_values and positive:
        floor = min(positive) / 4.0
        ax.set_yticks([floor] + positive)
        ax.set_yticklabels(["0"] + [f"{v:g}" for v in positive])
    ax.set_xlabel(spec.xlabel or "geometric coherence c")
    ax.set_ylabel(spec.ylabel or "per-call noise rate p_err")
    ax.legend(loc="upper left", fontsize=8)
    fig.tight_layout()
    return fig


_BUILDERS = {
    "scaling-comparison": _scaling_figure,
    "estimation-error": _estimation_figure,
    "noise-heatmap": _noise_figure,
}


def render(spec: PlotSpec) -> str:
    """Render the requested figure and write it to spec.out."""
    fig = _BUILDERS[spec.kind](spec)
    _save(fig, spec.out)
    return spec.out
