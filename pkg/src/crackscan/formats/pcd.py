"""ASCII PCD codec.

Packed ``rgb`` fields are accepted both as float bit patterns (``TYPE F``)
and as unsigned integers (``TYPE U``); the writer emits ``TYPE U``.
"""

import logging
from pathlib import Path

import numpy as np

from ..exceptions import IoError, ParseError, UnsupportedFormat
from .schemas import PointCloud

log = logging.getLogger(__name__)

_REQUIRED = ("FIELDS", "POINTS", "DATA")


def read_pcd(path: str | Path) -> PointCloud:
    path_str = str(path)
    try:
        text = Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError as e:
        raise ParseError("PCD file is not text.", path=path_str, offset=e.start) from e
    except OSError as e:
        raise IoError(f"Cannot read {path_str}: {e}", original_error=e) from e

    lines = text.splitlines()
    fields: dict[str, list[str]] = {}
    data_line = None
    for lineno, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        key, *values = stripped.split()
        fields[key.upper()] = values
        if key.upper() == "DATA":
            data_line = lineno
            break

    missing = [k for k in _REQUIRED if k not in fields]
    if missing or data_line is None:
        raise ParseError(f"PCD header lacks {missing or ['DATA']}.", path=path_str)
    if fields["DATA"] != ["ascii"]:
        encoding = " ".join(fields["DATA"])
        raise UnsupportedFormat(f"PCD DATA {encoding} is not supported.")

    names = fields["FIELDS"]
    types = fields.get("TYPE", ["F"] * len(names))
    counts = fields.get("COUNT", ["1"] * len(names))
    if len(types) != len(names) or any(c != "1" for c in counts):
        raise ParseError("Unsupported FIELDS/TYPE/COUNT layout.", path=path_str)
    for axis in ("x", "y", "z"):
        if axis not in names:
            raise ParseError(f"PCD lacks field '{axis}'.", path=path_str)
    try:
        n_points = int(fields["POINTS"][0])
    except (ValueError, IndexError) as e:
        raise ParseError("Invalid POINTS value.", path=path_str) from e

    rows = [ln for ln in lines[data_line:] if ln.strip()]
    if len(rows) < n_points:
        raise ParseError(
            f"Expected {n_points} points, found {len(rows)}.",
            path=path_str,
            line=len(lines) + 1,
        )
    values = np.empty((n_points, len(names)), dtype=np.float64)
    rgb_raw: list[int] = []
    rgb_col = names.index("rgb") if "rgb" in names else None
    for i, row in enumerate(rows[:n_points]):
        parts = row.split()
        lineno = data_line + 1 + i
        if len(parts) != len(names):
            raise ParseError(
                f"Expected {len(names)} values, found {len(parts)}.",
                path=path_str,
                line=lineno,
            )
        try:
            values[i] = [float(p) for p in parts]
            if rgb_col is not None:
                rgb_raw.append(_packed_rgb(parts[rgb_col], types[rgb_col]))
        except (ValueError, OverflowError) as e:
            raise ParseError(
                "Non-numeric point value.", path=path_str, line=lineno
            ) from e

    points = values[:, [names.index("x"), names.index("y"), names.index("z")]]
    finite = np.all(np.isfinite(points), axis=1)
    dropped = int((~finite).sum())
    if dropped:
        log.warning(f"Dropped {dropped} non-finite points from {path_str}")

    attrs: dict = {}
    intensity_max = None
    if "intensity" in names:
        attrs["intensity"] = values[finite, names.index("intensity")]
        peak = float(attrs["intensity"].max()) if finite.any() else 0.0
        intensity_max = 1.0 if peak <= 1.0 else 255.0
    if rgb_col is not None:
        packed = np.array(rgb_raw, dtype=np.uint32)[finite]
        attrs["color"] = np.column_stack(
            [(packed >> 16) & 0xFF, (packed >> 8) & 0xFF, packed & 0xFF]
        )
    if "label" in names:
        attrs["label"] = values[finite, names.index("label")]
    return PointCloud(
        points=points[finite], intensity_max=intensity_max, dropped=dropped, **attrs
    )


def _packed_rgb(token: str, type_code: str) -> int:
    if type_code.upper() == "F":
        return int(np.array([float(token)], dtype=np.float32).view(np.uint32)[0])
    return int(token) & 0xFFFFFFFF


def write_pcd(cloud: PointCloud, path: str | Path) -> None:
    names, sizes, types = ["x", "y", "z"], ["8", "8", "8"], ["F", "F", "F"]
    columns = [cloud.points[:, 0], cloud.points[:, 1], cloud.points[:, 2]]
    if cloud.intensity is not None:
        names.append("intensity")
        sizes.append("4")
        types.append("F")
        columns.append(cloud.intensity)
    if cloud.color is not None:
        c = cloud.color.astype(np.uint32)
        names.append("rgb")
        sizes.append("4")
        types.append("U")
        columns.append((c[:, 0] << 16) | (c[:, 1] << 8) | c[:, 2])
    if cloud.label is not None:
        names.append("label")
        sizes.append("4")
        types.append("U")
        columns.append(cloud.label)

    header = [
        "# .PCD v0.7 - Point Cloud Data file format",
        "VERSION 0.7",
        f"FIELDS {' '.join(names)}",
        f"SIZE {' '.join(sizes)}",
        f"TYPE {' '.join(types)}",
        f"COUNT {' '.join('1' for _ in names)}",
        f"WIDTH {len(cloud)}",
        "HEIGHT 1",
        "VIEWPOINT 0 0 0 1 0 0 0",
        f"POINTS {len(cloud)}",
        "DATA ascii",
    ]
    rows = []
    for i in range(len(cloud)):
        rows.append(
            " ".join(
                repr(float(col[i])) if t == "F" else str(int(col[i]))
                for col, t in zip(columns, types)
            )
        )
    try:
        Path(path).write_text("\n".join(header + rows) + "\n", encoding="utf-8")
    except OSError as e:
        raise IoError(f"Cannot write {path}: {e}", original_error=e) from e
