import logging
from typing import Iterable, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ..exceptions import BehindCamera, OutOfRange, ValidationError
from . import quaternion as quat
from .schemas import CameraModel, Point3, RigidPose

log = logging.getLogger(__name__)

SMALL_ANGLE = 1e-8


def _as_point(p: ArrayLike) -> Point3:
    arr = np.asarray(p, dtype=np.float64)
    if arr.shape != (3,) or not np.all(np.isfinite(arr)):
        raise ValidationError("A point must be a finite 3-vector.")
    return arr


def transform_points(pose: RigidPose, points: ArrayLike) -> NDArray[np.float64]:
    """Apply ``pose`` to an ``(N, 3)`` array of points."""
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    r = pose.rotation_matrix()
    t = pose.translation
    x, y, z = pts[:, 0], pts[:, 1], pts[:, 2]
    out = np.empty_like(pts)
    for i in range(3):
        out[:, i] = r[i, 0] * x + r[i, 1] * y + r[i, 2] * z + t[i]
    return out


def transform_point(pose: RigidPose, p: ArrayLike) -> Point3:
    return transform_points(pose, _as_point(p)[None, :])[0]


def project(cam: CameraModel, p_cam: ArrayLike) -> tuple[float, float]:
    x, y, z = _as_point(p_cam)
    if z <= 0.0:
        raise BehindCamera()
    return float(cam.fx * x / z + cam.cx), float(cam.fy * y / z + cam.cy)


def project_points(
    cam: CameraModel, points_cam: ArrayLike
) -> tuple[NDArray[np.float64], NDArray[np.bool_]]:
    """Vectorized ``project``.

    Returns:
        ``(uv, in_front)`` where ``uv`` is ``(N, 2)`` and rows of points with
        ``z <= 0`` are NaN.
    """
    pts = np.asarray(points_cam, dtype=np.float64).reshape(-1, 3)
    in_front = pts[:, 2] > 0.0
    uv = np.full((len(pts), 2), np.nan)
    z = pts[in_front, 2]
    uv[in_front, 0] = cam.fx * pts[in_front, 0] / z + cam.cx
    uv[in_front, 1] = cam.fy * pts[in_front, 1] / z + cam.cy
    return uv, in_front


def project_lidar_point(
    cam: CameraModel, extrinsic: RigidPose, p_lidar: ArrayLike
) -> tuple[float, float]:
    return project(cam, transform_point(extrinsic, p_lidar))


def slerp_pose(p0: RigidPose, p1: RigidPose, t: float) -> RigidPose:
    """Interpolate rotation along the shortest arc and translation linearly.

    The endpoints are returned unchanged at ``t == 0`` and ``t == 1``.
    """
    if not 0.0 <= t <= 1.0:
        raise OutOfRange(f"Interpolation parameter {t} is outside [0, 1].")
    if t == 0.0:
        return p0
    if t == 1.0:
        return p1

    q0 = p0.rotation_array
    q1 = p1.rotation_array
    if float(np.dot(q0, q1)) < 0.0:
        q1 = -q1

    omega = quat.arc_angle(q0, q1)
    if omega < SMALL_ANGLE:
        q = (1.0 - t) * q0 + t * q1
    else:
        sin_omega = np.sin(omega)
        q = (np.sin((1.0 - t) * omega) / sin_omega) * q0 + (
            np.sin(t * omega) / sin_omega
        ) * q1

    translation = (1.0 - t) * p0.translation_array + t * p1.translation_array
    timestamp = None
    if p0.timestamp is not None and p1.timestamp is not None:
        timestamp = (1.0 - t) * p0.timestamp + t * p1.timestamp
    return RigidPose(rotation=q, translation=translation, timestamp=timestamp)


def interpolate_camera_pose(trajectory: Iterable[RigidPose], t_cam: float) -> RigidPose:
    """Pose of the trajectory at time ``t_cam``.

    Finds the bracketing entries and slerps between them; an exact timestamp
    hit returns that entry.
    """
    poses = list(trajectory)
    if not poses:
        raise OutOfRange("Trajectory is empty.")
    times = np.array([p.timestamp for p in poses], dtype=np.float64)
    if not times[0] <= t_cam <= times[-1]:
        raise OutOfRange(
            f"Timestamp {t_cam} is outside the trajectory span "
            f"[{times[0]}, {times[-1]}]."
        )
    idx = int(np.searchsorted(times, t_cam, side="right")) - 1
    if times[idx] == t_cam:
        return poses[idx]
    t0, t1 = times[idx], times[idx + 1]
    pose = slerp_pose(poses[idx], poses[idx + 1], (t_cam - t0) / (t1 - t0))
    return pose.with_timestamp(t_cam)


def camera_pose_from_lidar(lidar_pose: RigidPose, extrinsic: RigidPose) -> RigidPose:
    """Camera-to-world pose from a LiDAR-to-world pose and the LiDAR-to-camera
    extrinsic."""
    return lidar_pose.compose(extrinsic.inverse()).with_timestamp(lidar_pose.timestamp)


def camera_poses_for_frames(
    trajectory: Iterable[RigidPose],
    timestamps: Sequence[float],
    extrinsic: RigidPose,
) -> list[RigidPose]:
    poses = list(trajectory)
    result = []
    for ts in timestamps:
        lidar_pose = interpolate_camera_pose(poses, ts)
        result.append(camera_pose_from_lidar(lidar_pose, extrinsic))
    log.debug("Interpolated %d camera poses", len(result))
    return result


def back_project_ray(
    cam: CameraModel, camera_pose: RigidPose, u: float, v: float
) -> tuple[Point3, Point3]:
    """World-frame viewing ray ``(origin, unit direction)`` through pixel (u, v)."""
    d_cam = np.array([(u - cam.cx) / cam.fx, (v - cam.cy) / cam.fy, 1.0])
    d_world = camera_pose.rotation_matrix() @ d_cam
    return camera_pose.translation_array, d_world / np.linalg.norm(d_world)
