from .metrics import (
    confusion_counts,
    dimension_error,
    miou,
    point_surface_density,
    surface_roughness,
)
from .report import render_metrics_report, write_metrics_report
from .schemas import ConfusionCounts, EvaluationReport, StatSummary

__all__ = [
    "ConfusionCounts",
    "EvaluationReport",
    "StatSummary",
    "confusion_counts",
    "dimension_error",
    "miou",
    "point_surface_density",
    "render_metrics_report",
    "surface_roughness",
    "write_metrics_report",
]
