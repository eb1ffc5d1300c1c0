"""Figures from coherence-detection benchmark CSVs."""

from .figures import PlotSpec, render
from .records import (
    FIGURE_KINDS,
    SchemaError,
    aggregate_estimation,
    aggregate_noise,
    aggregate_scaling,
    fit_loglog_slope,
    load_rows,
)

__version__ = "0.1.0"
