from __future__ import annotations

from pathlib import Path
from typing import Any, Optional

from pydantic import Field

from ..calibration.schemas import CalibrationConfig
from ..core.base import ArrayRecord, Record
from ..denoise.schemas import DenoiseConfig
from ..formats.schemas import BinaryMask, PointCloud, RasterImage, SeedEntry, Trajectory
from ..fusion.schemas import FusionConfig
from ..geometry.schemas import CameraModel, RigidPose
from ..masks.schemas import MaskParams
from ..metrology.schemas import MetrologyParams

Vec3 = tuple[float, float, float]


class PathsConfig(Record):
    """Input files; relative paths are resolved against the config file."""

    cloud: Path
    trajectory: Path
    camera: Path
    frames: Path
    extrinsic: Path
    seeds: Optional[Path] = None
    reference_widths: Optional[Path] = None
    ground_truth_masks: Optional[Path] = None

    def resolved(self, base: Path) -> PathsConfig:
        values = {
            name: (base / value if value is not None else None)
            for name, value in self
        }
        return PathsConfig(**values)

    def missing(self) -> list[str]:
        return [
            f"{name}: {value}"
            for name, value in self
            if value is not None and not Path(value).exists()
        ]


class StageToggles(Record):
    calibrate: bool = False
    refine_masks: bool = False
    denoise: bool = True
    fuse: bool = True
    measure: bool = True
    evaluate: bool = True


class MaskStageConfig(Record):
    refiner: str = "identity"
    params: MaskParams = Field(default_factory=MaskParams)


class GeometryCheck(Record):
    """Known distance between two points of the scanned object."""

    p: Vec3
    q: Vec3
    reference: float = Field(gt=0)


class EvaluationConfig(Record):
    density_radius: float = Field(default=0.01, gt=0)
    roughness_radius: float = Field(default=0.01, gt=0)
    geometry_checks: list[GeometryCheck] = Field(default_factory=list)


class PipelineConfig(Record):
    """One run of the whole workflow, loaded from a YAML file."""

    paths: PathsConfig
    output_dir: Path = Path("crackscan-out")
    workers: Optional[int] = Field(default=None, ge=1)
    stages: StageToggles = Field(default_factory=StageToggles)
    calibration: CalibrationConfig = Field(default_factory=CalibrationConfig)
    masks: MaskStageConfig = Field(default_factory=MaskStageConfig)
    denoise: DenoiseConfig = Field(default_factory=DenoiseConfig)
    fusion: FusionConfig = Field(default_factory=FusionConfig)
    metrology: MetrologyParams = Field(default_factory=MetrologyParams)
    evaluation: EvaluationConfig = Field(default_factory=EvaluationConfig)


class FrameData(ArrayRecord):
    frame_id: str
    timestamp: float
    image: RasterImage
    mask: Optional[BinaryMask] = None


class PipelineInputs(ArrayRecord):
    cloud: PointCloud
    trajectory: Trajectory
    camera: CameraModel
    extrinsic: RigidPose
    frames: list[FrameData]
    seeds: list[SeedEntry] = Field(default_factory=list)
    reference_widths: dict[str, float] = Field(default_factory=dict)
    ground_truth_masks: dict[str, BinaryMask] = Field(default_factory=dict)


class DenoiseSummary(Record):
    input_points: int
    cropped_points: int
    removed_points: int
    smoothed: bool
    fallback_points: int = 0
    mls_radius: Optional[float] = None


class RunManifest(Record):
    """Machine-readable record of one pipeline run."""

    crackscan_version: str
    versions: dict[str, str]
    started_at: str
    status: str = "ok"
    failed_stage: Optional[str] = None
    error: Optional[str] = None
    inputs: dict[str, Optional[str]]
    parameters: dict[str, Any]
    timings: dict[str, float] = Field(default_factory=dict)
    outputs: dict[str, str] = Field(default_factory=dict)
    summary: dict[str, Any] = Field(default_factory=dict)
