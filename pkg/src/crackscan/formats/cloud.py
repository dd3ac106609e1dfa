from pathlib import Path
from typing import Literal

from ..exceptions import UnsupportedFormat
from .pcd import read_pcd, write_pcd
from .ply import read_ply, write_ply
from .schemas import PointCloud


def load_point_cloud(path: str | Path) -> PointCloud:
    """Load a PLY (ASCII or binary little-endian) or ASCII PCD file.

    The number of points dropped for non-finite coordinates is reported in
    ``PointCloud.dropped``.
    """
    suffix = Path(path).suffix.lower()
    if suffix == ".ply":
        return read_ply(path)
    if suffix == ".pcd":
        return read_pcd(path)
    raise UnsupportedFormat(f"Unknown point cloud extension '{suffix}'.")


def save_point_cloud(
    cloud: PointCloud,
    path: str | Path,
    encoding: Literal["binary", "ascii"] = "binary",
) -> None:
    suffix = Path(path).suffix.lower()
    if suffix == ".ply":
        write_ply(cloud, path, binary=encoding == "binary")
    elif suffix == ".pcd":
        if encoding != "ascii":
            raise UnsupportedFormat("Only ASCII PCD output is supported.")
        write_pcd(cloud, path)
    else:
        raise UnsupportedFormat(f"Unknown point cloud extension '{suffix}'.")
