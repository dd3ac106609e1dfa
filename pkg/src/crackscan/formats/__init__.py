from .cloud import load_point_cloud, save_point_cloud
from .listings import (
    load_camera,
    load_frames,
    load_reference_widths,
    load_seeds,
    save_camera,
    save_frames,
    save_reference_widths,
    save_seeds,
)
from .raster import load_image, load_mask, save_image, save_mask
from .report import load_measurement_report, write_measurement_report
from .schemas import (
    BinaryMask,
    FrameEntry,
    PointCloud,
    RasterImage,
    SeedEntry,
    Trajectory,
)
from .trajectory import load_pose, load_trajectory, save_pose, save_trajectory

__all__ = [
    # Types
    "BinaryMask",
    "FrameEntry",
    "PointCloud",
    "RasterImage",
    "SeedEntry",
    "Trajectory",
    # Point clouds
    "load_point_cloud",
    "save_point_cloud",
    # Poses
    "load_pose",
    "load_trajectory",
    "save_pose",
    "save_trajectory",
    # Rasters
    "load_image",
    "load_mask",
    "save_image",
    "save_mask",
    # Reports and listings
    "load_measurement_report",
    "write_measurement_report",
    "load_camera",
    "save_camera",
    "load_frames",
    "save_frames",
    "load_seeds",
    "save_seeds",
    "load_reference_widths",
    "save_reference_widths",
]
