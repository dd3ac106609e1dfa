"""Pose files: one pose per line, ``timestamp tx ty tz qw qx qy qz``.

Blank lines and lines starting with ``#`` are ignored. A single-line file
of the same grammar stores an extrinsic.
"""

import logging
import math
from pathlib import Path
from typing import Iterable

from ..exceptions import IoError, NonMonotonicTimestamps, ParseError
from ..geometry.schemas import RigidPose
from .schemas import Trajectory

log = logging.getLogger(__name__)

NORM_TOLERANCE = 1e-6


def _read_lines(path: str | Path) -> list[str]:
    try:
        return Path(path).read_text(encoding="utf-8").splitlines()
    except UnicodeDecodeError as e:
        raise ParseError("Pose file is not UTF-8 text.", path=str(path)) from e
    except OSError as e:
        raise IoError(f"Cannot read {path}: {e}", original_error=e) from e


def _parse_pose(line: str, lineno: int, path: str) -> RigidPose:
    parts = line.split()
    if len(parts) != 8:
        raise ParseError(
            f"Expected 8 values, found {len(parts)}.", path=path, line=lineno
        )
    try:
        values = [float(p) for p in parts]
    except ValueError as e:
        raise ParseError("Non-numeric pose value.", path=path, line=lineno) from e
    if not all(math.isfinite(v) for v in values):
        raise ParseError("Non-finite pose value.", path=path, line=lineno)

    t, tx, ty, tz, qw, qx, qy, qz = values
    norm = math.sqrt(qw * qw + qx * qx + qy * qy + qz * qz)
    if norm == 0.0:
        raise ParseError("Zero quaternion.", path=path, line=lineno)
    if abs(norm - 1.0) > NORM_TOLERANCE:
        log.warning(
            "Quaternion at %s:%d has norm %.6f; renormalized", path, lineno, norm
        )
    return RigidPose(
        rotation=(qw, qx, qy, qz), translation=(tx, ty, tz), timestamp=t
    )


def load_trajectory(path: str | Path) -> Trajectory:
    path_str = str(path)
    poses: list[RigidPose] = []
    last_line = 0
    for lineno, line in enumerate(_read_lines(path), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        pose = _parse_pose(stripped, lineno, path_str)
        if poses and pose.timestamp <= poses[-1].timestamp:
            raise NonMonotonicTimestamps(line=lineno)
        poses.append(pose)
        last_line = lineno
    if not poses:
        raise ParseError("Pose file contains no poses.", path=path_str, line=1)
    log.debug("Loaded %d poses (last at line %d) from %s", len(poses), last_line, path)
    return Trajectory(poses)


def load_pose(path: str | Path) -> RigidPose:
    """Load a single pose (an extrinsic) stored in the trajectory grammar."""
    trajectory = load_trajectory(path)
    if len(trajectory) != 1:
        raise ParseError(
            f"Expected exactly one pose, found {len(trajectory)}.", path=str(path)
        )
    return trajectory[0]


def format_pose(pose: RigidPose) -> str:
    values = (pose.timestamp or 0.0, *pose.translation, *pose.rotation)
    return " ".join(repr(float(v)) for v in values)


def save_trajectory(poses: Iterable[RigidPose], path: str | Path) -> None:
    text = "".join(format_pose(p) + "\n" for p in poses)
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as e:
        raise IoError(f"Cannot write {path}: {e}", original_error=e) from e


def save_pose(pose: RigidPose, path: str | Path) -> None:
    save_trajectory([pose], path)
