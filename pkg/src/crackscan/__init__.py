"""
crackscan - crack width measurement from LiDAR point clouds and camera frames.

The package turns a scan (point cloud, LiDAR trajectory, camera frames with
crack masks and a LiDAR-to-camera extrinsic) into a colorized, crack-labeled
cloud and a report of crack widths in millimeters.

Main Entrypoints:
    `from crackscan import run_pipeline, load_pipeline_config`
    `crackscan --help` on the command line

Basic Usage:
    >>> import asyncio
    >>> from crackscan import load_pipeline_config, run_pipeline
    >>>
    >>> config = load_pipeline_config("pipeline.yaml")
    >>> manifest = asyncio.run(run_pipeline(config))
    >>> print(manifest.outputs)
"""

import logging

from .exceptions import (
    BehindCamera,
    CrackscanError,
    FormatError,
    InvalidSpec,
    IoError,
    ParseError,
    StageError,
    UnsupportedFormat,
    ValidationError,
)
from .formats.schemas import BinaryMask, PointCloud, RasterImage, Trajectory
from .fusion.fuse import fuse_cloud
from .geometry.schemas import CameraModel, RigidPose
from .metrology.measure import compute_error_stats, measure_crack
from .metrology.schemas import CrackMeasurement, MetrologyParams
from .pipeline.config import load_pipeline_config
from .pipeline.runner import PipelineRunner, run_pipeline
from .pipeline.schemas import PipelineConfig, RunManifest
from .synth.scene import generate_scene, write_scene
from .synth.schemas import SceneSpec

logging.getLogger("crackscan").addHandler(logging.NullHandler())

__all__ = [
    # Pipeline
    "PipelineConfig",
    "PipelineRunner",
    "RunManifest",
    "load_pipeline_config",
    "run_pipeline",
    # Exceptions
    "CrackscanError",
    "ValidationError",
    "FormatError",
    "ParseError",
    "UnsupportedFormat",
    "IoError",
    "BehindCamera",
    "InvalidSpec",
    "StageError",
    # Data
    "PointCloud",
    "Trajectory",
    "RasterImage",
    "BinaryMask",
    "CameraModel",
    "RigidPose",
    # Operations
    "fuse_cloud",
    "measure_crack",
    "compute_error_stats",
    "CrackMeasurement",
    "MetrologyParams",
    "SceneSpec",
    "generate_scene",
    "write_scene",
]
