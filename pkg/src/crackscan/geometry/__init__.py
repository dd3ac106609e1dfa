from .operations import (
    back_project_ray,
    camera_pose_from_lidar,
    camera_poses_for_frames,
    interpolate_camera_pose,
    project,
    project_lidar_point,
    project_points,
    slerp_pose,
    transform_point,
    transform_points,
)
from .schemas import CameraModel, Point3, RigidPose

__all__ = [
    "CameraModel",
    "Point3",
    "RigidPose",
    "back_project_ray",
    "camera_pose_from_lidar",
    "camera_poses_for_frames",
    "interpolate_camera_pose",
    "project",
    "project_lidar_point",
    "project_points",
    "slerp_pose",
    "transform_point",
    "transform_points",
]
