"""PLY point-cloud codec (ASCII and binary little-endian).

Only the ``vertex`` element is materialized. Recognized vertex properties are
``x y z`` (required), ``intensity``, ``red green blue``, ``label`` and
``support``; other properties are read and ignored. The intensity scale is
recorded as a ``comment intensity_max <value>`` header line.
"""

import logging
from pathlib import Path
from typing import Optional

import numpy as np

from ..exceptions import IoError, ParseError, UnsupportedFormat
from .schemas import PointCloud

log = logging.getLogger(__name__)

_PLY_TYPES = {
    "char": "i1",
    "int8": "i1",
    "uchar": "u1",
    "uint8": "u1",
    "short": "i2",
    "int16": "i2",
    "ushort": "u2",
    "uint16": "u2",
    "int": "i4",
    "int32": "i4",
    "uint": "u4",
    "uint32": "u4",
    "float": "f4",
    "float32": "f4",
    "double": "f8",
    "float64": "f8",
}


class _Element:
    def __init__(self, name: str, count: int):
        self.name = name
        self.count = count
        self.properties: list[tuple[str, str]] = []
        self.has_list = False

    def dtype(self) -> np.dtype:
        return np.dtype([(name, "<" + code) for name, code in self.properties])


class _Header:
    def __init__(self):
        self.encoding: Optional[str] = None
        self.elements: list[_Element] = []
        self.intensity_max: Optional[float] = None
        self.line_count = 0
        self.byte_length = 0


def _parse_header(raw: bytes, path: str) -> _Header:
    header = _Header()
    end = raw.find(b"end_header")
    if not raw.startswith(b"ply") or end < 0:
        raise ParseError("Missing 'ply' magic or 'end_header'.", path=path, line=1)
    newline = raw.find(b"\n", end)
    header.byte_length = len(raw) if newline < 0 else newline + 1
    try:
        text = raw[: header.byte_length].decode("ascii")
    except UnicodeDecodeError as e:
        raise ParseError("Header is not ASCII.", path=path, offset=e.start) from e

    lines = text.splitlines()
    header.line_count = len(lines)
    for lineno, line in enumerate(lines, start=1):
        parts = line.split()
        if not parts or parts[0] in ("ply", "obj_info", "end_header"):
            continue
        keyword = parts[0]
        if keyword == "format":
            if len(parts) != 3:
                raise ParseError("Malformed format line.", path=path, line=lineno)
            if parts[1] == "binary_big_endian":
                raise UnsupportedFormat("Big-endian PLY is not supported.")
            if parts[1] not in ("ascii", "binary_little_endian"):
                raise ParseError(
                    f"Unknown PLY encoding '{parts[1]}'.", path=path, line=lineno
                )
            header.encoding = parts[1]
        elif keyword == "comment":
            if len(parts) == 3 and parts[1] == "intensity_max":
                try:
                    header.intensity_max = float(parts[2])
                except ValueError as e:
                    raise ParseError(
                        "Invalid intensity_max comment.", path=path, line=lineno
                    ) from e
        elif keyword == "element":
            if len(parts) != 3 or not parts[2].isdigit():
                raise ParseError("Malformed element line.", path=path, line=lineno)
            header.elements.append(_Element(parts[1], int(parts[2])))
        elif keyword == "property":
            if not header.elements:
                raise ParseError(
                    "Property declared before any element.", path=path, line=lineno
                )
            element = header.elements[-1]
            if len(parts) == 5 and parts[1] == "list":
                element.has_list = True
                element.properties.append((parts[4], "list"))
                continue
            if len(parts) != 3 or parts[1] not in _PLY_TYPES:
                raise ParseError("Malformed property line.", path=path, line=lineno)
            element.properties.append((parts[2], _PLY_TYPES[parts[1]]))
        else:
            raise ParseError(
                f"Unknown header keyword '{keyword}'.", path=path, line=lineno
            )

    if header.encoding is None:
        raise ParseError("Missing format line.", path=path, line=2)
    return header


def _vertex_element(header: _Header, path: str) -> tuple[_Element, int]:
    for position, element in enumerate(header.elements):
        if element.name == "vertex":
            names = [name for name, _ in element.properties]
            if element.has_list:
                raise UnsupportedFormat(
                    "List properties on vertices are not supported."
                )
            for axis in ("x", "y", "z"):
                if axis not in names:
                    raise ParseError(
                        f"Vertex element lacks property '{axis}'.", path=path
                    )
            return element, position
    raise ParseError("No vertex element declared.", path=path)


def _read_ascii(
    body: str, header: _Header, vertex: _Element, position: int, path: str
) -> np.ndarray:
    lines = body.splitlines()
    skip = sum(e.count for e in header.elements[:position])
    first_line = header.line_count + skip + 1
    rows = lines[skip : skip + vertex.count]
    if len(rows) < vertex.count:
        raise ParseError(
            f"Expected {vertex.count} vertex lines, found {len(rows)}.",
            path=path,
            line=header.line_count + len(lines) + 1,
        )
    width = len(vertex.properties)
    values = np.empty((vertex.count, width), dtype=np.float64)
    for i, row in enumerate(rows):
        parts = row.split()
        if len(parts) != width:
            raise ParseError(
                f"Expected {width} values, found {len(parts)}.",
                path=path,
                line=first_line + i,
            )
        try:
            values[i] = [float(p) for p in parts]
        except ValueError as e:
            raise ParseError(
                "Non-numeric vertex value.", path=path, line=first_line + i
            ) from e

    out = np.empty(vertex.count, dtype=vertex.dtype())
    for j, (name, _) in enumerate(vertex.properties):
        out[name] = values[:, j]
    return out


def _read_binary(
    raw: bytes, header: _Header, vertex: _Element, position: int, path: str
) -> np.ndarray:
    offset = header.byte_length
    for element in header.elements[:position]:
        if element.has_list:
            raise UnsupportedFormat(
                "List-valued elements before the vertex block are not supported."
            )
        offset += element.count * element.dtype().itemsize
    dtype = vertex.dtype()
    needed = vertex.count * dtype.itemsize
    if offset + needed > len(raw):
        raise ParseError(
            f"Binary payload truncated: need {needed} bytes.",
            path=path,
            offset=len(raw),
        )
    return np.frombuffer(raw, dtype=dtype, count=vertex.count, offset=offset).copy()


def read_ply(path: str | Path) -> PointCloud:
    path_str = str(path)
    try:
        raw = Path(path).read_bytes()
    except OSError as e:
        raise IoError(f"Cannot read {path_str}: {e}", original_error=e) from e

    header = _parse_header(raw, path_str)
    vertex, position = _vertex_element(header, path_str)

    if header.encoding == "ascii":
        try:
            body = raw[header.byte_length :].decode("ascii")
        except UnicodeDecodeError as e:
            raise ParseError(
                "Body is not ASCII.", path=path_str, offset=header.byte_length + e.start
            ) from e
        data = _read_ascii(body, header, vertex, position, path_str)
    else:
        data = _read_binary(raw, header, vertex, position, path_str)

    return _to_cloud(data, header.intensity_max, path_str)


def _to_cloud(
    data: np.ndarray, intensity_max: Optional[float], path: str
) -> PointCloud:
    names = data.dtype.names
    points = np.zeros((len(data), 3))
    for axis, name in enumerate(("x", "y", "z")):
        points[:, axis] = data[name]
    finite = np.all(np.isfinite(points), axis=1)
    dropped = int((~finite).sum())
    if dropped:
        log.warning(f"Dropped {dropped} non-finite points from {path}")

    attrs: dict = {}
    if "intensity" in names:
        attrs["intensity"] = data["intensity"].astype(np.float64)[finite]
        if intensity_max is None:
            peak = float(attrs["intensity"].max()) if finite.any() else 0.0
            intensity_max = 1.0 if peak <= 1.0 else 255.0
    if all(c in names for c in ("red", "green", "blue")):
        attrs["color"] = np.column_stack(
            [data["red"], data["green"], data["blue"]]
        )[finite]
    if "label" in names:
        attrs["label"] = data["label"][finite]
    if "support" in names:
        attrs["support"] = data["support"][finite]

    return PointCloud(
        points=points[finite],
        intensity_max=intensity_max if "intensity" in attrs else None,
        dropped=dropped,
        **attrs,
    )


def _vertex_layout(cloud: PointCloud) -> list[tuple[str, str, str]]:
    layout = [("x", "double", "f8"), ("y", "double", "f8"), ("z", "double", "f8")]
    if cloud.intensity is not None:
        layout.append(("intensity", "float", "f4"))
    if cloud.color is not None:
        layout += [(c, "uchar", "u1") for c in ("red", "green", "blue")]
    if cloud.label is not None:
        layout.append(("label", "uchar", "u1"))
    if cloud.support is not None:
        layout.append(("support", "int", "i4"))
    return layout


def write_ply(cloud: PointCloud, path: str | Path, *, binary: bool = True) -> None:
    layout = _vertex_layout(cloud)
    lines = [
        "ply",
        "format binary_little_endian 1.0" if binary else "format ascii 1.0",
        "comment generated by crackscan",
    ]
    if cloud.intensity is not None:
        lines.append(f"comment intensity_max {cloud.intensity_max or 255.0:g}")
    lines.append(f"element vertex {len(cloud)}")
    lines += [f"property {ply_type} {name}" for name, ply_type, _ in layout]
    lines.append("end_header")
    header = ("\n".join(lines) + "\n").encode("ascii")

    data = np.empty(len(cloud), dtype=[(name, "<" + code) for name, _, code in layout])
    data["x"], data["y"], data["z"] = cloud.points.T
    if cloud.intensity is not None:
        data["intensity"] = cloud.intensity
    if cloud.color is not None:
        data["red"], data["green"], data["blue"] = cloud.color.T
    if cloud.label is not None:
        data["label"] = cloud.label
    if cloud.support is not None:
        data["support"] = cloud.support

    if binary:
        payload = data.tobytes()
    else:
        rows = []
        for record in data:
            rows.append(
                " ".join(
                    repr(float(v)) if code.startswith("f") else str(int(v))
                    for v, (_, _, code) in zip(record, layout)
                )
            )
        payload = ("\n".join(rows) + ("\n" if rows else "")).encode("ascii")

    try:
        Path(path).write_bytes(header + payload)
    except OSError as e:
        raise IoError(f"Cannot write {path}: {e}", original_error=e) from e
    log.debug("Wrote %d points to %s", len(cloud), path)
