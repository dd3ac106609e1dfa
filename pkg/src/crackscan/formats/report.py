import csv
import io
import logging
from pathlib import Path
from typing import Iterable

from ..exceptions import IoError, ParseError
from ..metrology.schemas import CrackMeasurement

log = logging.getLogger(__name__)

REPORT_HEADER = (
    "crack_id",
    "u",
    "v",
    "frame_id",
    "left_x",
    "left_y",
    "left_z",
    "right_x",
    "right_y",
    "right_z",
    "width_mm",
)


def _fmt(value: float) -> str:
    return repr(float(value))


def width_to_mm(width_m: float) -> float:
    return round(width_m * 1000.0, 4)


def render_measurement_report(measurements: Iterable[CrackMeasurement]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(REPORT_HEADER)
    for m in measurements:
        writer.writerow(
            [
                m.crack_id,
                _fmt(m.seed[0]),
                _fmt(m.seed[1]),
                m.frame_id,
                *(f"{c:.9f}" for c in m.edge_left_3d),
                *(f"{c:.9f}" for c in m.edge_right_3d),
                _fmt(width_to_mm(m.width)),
            ]
        )
    return buffer.getvalue()


def write_measurement_report(
    measurements: Iterable[CrackMeasurement], path: str | Path
) -> None:
    """Write measurements as CSV with widths in millimeters."""
    text = render_measurement_report(measurements)
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as e:
        raise IoError(f"Cannot write {path}: {e}", original_error=e) from e
    log.info("Wrote %d measurements to %s", text.count("\n") - 1, path)


def load_measurement_report(path: str | Path) -> list[dict[str, str]]:
    """Read a report back as a list of rows keyed by the header names."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise IoError(f"Cannot read {path}: {e}", original_error=e) from e
    reader = csv.reader(io.StringIO(text))
    rows = list(reader)
    if not rows or tuple(rows[0]) != REPORT_HEADER:
        raise ParseError("Unexpected report header.", path=str(path), line=1)
    result = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(REPORT_HEADER):
            raise ParseError("Wrong column count.", path=str(path), line=lineno)
        result.append(dict(zip(REPORT_HEADER, row)))
    return result
