from pathlib import Path

from ..exceptions import IoError
from .schemas import EvaluationReport

_LABEL_WIDTH = 40


def _rows(report: EvaluationReport) -> list[tuple[str, str]]:
    rows = []
    if report.density is not None:
        r_mm = f"r={report.density_radius * 1000.0:g} mm"
        rows.append((f"point surface density mean ({r_mm})", report.density.mean))
        rows.append((f"point surface density std ({r_mm})", report.density.std))
    if report.roughness is not None:
        rows.append(("surface roughness mean (mm)", report.roughness.mean * 1e3))
        rows.append(("surface roughness std (mm)", report.roughness.std * 1e3))
    if report.geometry_error is not None:
        rows.append(("geometry accuracy error (%)", report.geometry_error * 100.0))
    if report.miou is not None:
        rows.append(("mIoU", report.miou))
    for name, value in zip(("background", "crack"), report.class_iou or []):
        rows.append((f"IoU {name}", value))
    if report.width_errors is not None:
        rows.append(("width MAE (mm)", report.width_errors.mae_mm))
        rows.append(("width MRE (%)", report.width_errors.mre_percent))
        rows.append(("width pairs", report.width_errors.count))
    return [
        (label, str(v) if isinstance(v, int) else f"{v:.4f}") for label, v in rows
    ]


def render_metrics_report(report: EvaluationReport) -> str:
    """Plain-text metrics table, one metric per line."""
    lines = ["# crackscan evaluation", f"{'metric':<{_LABEL_WIDTH}}value"]
    lines += [f"{label:<{_LABEL_WIDTH}}{value}" for label, value in _rows(report)]
    lines += [f"# {note}" for note in report.notes]
    return "\n".join(lines) + "\n"


def write_metrics_report(report: EvaluationReport, path: str | Path) -> None:
    try:
        Path(path).write_text(render_metrics_report(report), encoding="utf-8")
    except OSError as e:
        raise IoError(f"Cannot write {path}: {e}", original_error=e) from e
