import pytest

from crackscan.evaluation.report import render_metrics_report, write_metrics_report
from crackscan.evaluation.schemas import EvaluationReport, StatSummary
from crackscan.exceptions import IoError
from crackscan.metrology.schemas import ErrorStats


@pytest.fixture
def report() -> EvaluationReport:
    return EvaluationReport(
        density=StatSummary(mean=2070.5, std=312.25, count=100),
        roughness=StatSummary(mean=0.0004, std=0.0002, count=100),
        roughness_radius=0.01,
        geometry_error=0.0123,
        miou=0.8,
        class_iou=[0.95, 0.65],
        width_errors=ErrorStats(mae_mm=0.09, mre_percent=14.2, count=15),
        notes=["fused cloud: run/fused.ply"],
    )


def _values(text: str) -> dict[str, str]:
    rows = {}
    for line in text.splitlines()[2:]:
        if line.startswith("#"):
            continue
        rows[line[:40].rstrip()] = line[40:]
    return rows


class TestRenderMetricsReport:
    def test_rows(self, report):
        values = _values(render_metrics_report(report))

        assert values == {
            "point surface density mean (r=10 mm)": "2070.5000",
            "point surface density std (r=10 mm)": "312.2500",
            "surface roughness mean (mm)": "0.4000",
            "surface roughness std (mm)": "0.2000",
            "geometry accuracy error (%)": "1.2300",
            "mIoU": "0.8000",
            "IoU background": "0.9500",
            "IoU crack": "0.6500",
            "width MAE (mm)": "0.0900",
            "width MRE (%)": "14.2000",
            "width pairs": "15",
        }

    def test_header_and_notes(self, report):
        lines = render_metrics_report(report).splitlines()

        assert lines[0] == "# crackscan evaluation"
        assert lines[1].startswith("metric")
        assert lines[-1] == "# fused cloud: run/fused.ply"

    def test_missing_metrics_are_omitted(self):
        text = render_metrics_report(EvaluationReport(miou=1.0))

        assert _values(text) == {"mIoU": "1.0000"}


class TestWriteMetricsReport:
    def test_writes_file(self, tmp_path, report):
        path = tmp_path / "metrics.txt"

        write_metrics_report(report, path)

        assert path.read_text(encoding="utf-8") == render_metrics_report(report)

    def test_missing_directory(self, tmp_path, report):
        with pytest.raises(IoError):
            write_metrics_report(report, tmp_path / "missing" / "metrics.txt")
