from __future__ import annotations

from pathlib import Path
from typing import Literal, Optional

import numpy as np
from pydantic import Field, field_validator, model_validator

from ..core.base import ArrayRecord, Record
from ..formats.schemas import BinaryMask, PointCloud, RasterImage, SeedEntry, Trajectory
from ..geometry.schemas import CameraModel, RigidPose

Vec2 = tuple[float, float]
Vec3 = tuple[float, float, float]


class SurfaceSpec(Record):
    """Scanned surface.

    Every surface exposes a crack domain ``[0, size[0]] x [0, size[1]]`` of
    isometric surface coordinates with its top at ``z = 0``: the plane
    itself, the top face of a box of the given ``depth``, or an arc of a
    cylinder of ``radius`` whose axis runs along x (``size[1]`` is then the
    arc length).
    """

    kind: Literal["plane", "box", "cylinder"] = "plane"
    size: Vec2 = (0.6, 0.4)
    depth: float = Field(default=0.08, gt=0)
    radius: float = Field(default=0.5, gt=0)
    spacing: float = Field(default=0.002, gt=0)

    @field_validator("size")
    @classmethod
    def _positive_size(cls, v: Vec2) -> Vec2:
        if v[0] <= 0 or v[1] <= 0:
            raise ValueError("surface size must be positive")
        return v

    @model_validator(mode="after")
    def _arc_fits(self) -> SurfaceSpec:
        if self.kind == "cylinder" and self.size[1] / self.radius >= np.pi:
            raise ValueError("cylinder arc must be shorter than half a turn")
        return self


class CrackSpec(Record):
    """Crack band around a polyline in surface coordinates.

    The width tapers linearly along the polyline from ``width`` to
    ``end_width`` when the latter is given.
    """

    crack_id: str
    centerline: list[Vec2] = Field(min_length=2)
    width: float = Field(gt=0)
    end_width: Optional[float] = Field(default=None, gt=0)


class TextureSpec(Record):
    kind: Literal["noise", "constant"] = "noise"
    scale: float = Field(default=0.05, gt=0)
    octaves: int = Field(default=2, ge=1, le=6)


class ShotSpec(Record):
    eye: Vec3
    target: Vec3
    up: Optional[Vec3] = None
    timestamp: Optional[float] = None


class SiteSpec(Record):
    """Close-up measurement view of a crack at a fraction of its length."""

    crack_id: str
    fraction: float = Field(default=0.5, ge=0, le=1)
    distance: float = Field(default=0.3, gt=0)
    site_id: Optional[str] = None


class PerturbationSpec(Record):
    rotation_deg: float = Field(default=1.0, ge=0)
    translation: float = Field(default=0.02, ge=0)


def _default_camera() -> CameraModel:
    return CameraModel(fx=3000, fy=3000, cx=319.5, cy=239.5, width=640, height=480)


def _default_cracks() -> list[CrackSpec]:
    return [
        CrackSpec(
            crack_id="c1", centerline=[(0.1, 0.12), (0.5, 0.16)], width=0.001
        ),
        CrackSpec(
            crack_id="c2",
            centerline=[(0.2, 0.3), (0.35, 0.26), (0.5, 0.32)],
            width=0.0008,
            end_width=0.0004,
        ),
    ]


def _default_sites() -> list[SiteSpec]:
    return [
        SiteSpec(crack_id="c1", fraction=0.3),
        SiteSpec(crack_id="c1", fraction=0.7),
        SiteSpec(crack_id="c2", fraction=0.5),
    ]


class SceneSpec(Record):
    """Everything needed to generate a synthetic scan deterministically.

    When ``shots`` is empty, five survey views of the whole surface are
    placed automatically.
    """

    name: str = "scene"
    seed: int = 0
    surface: SurfaceSpec = Field(default_factory=SurfaceSpec)
    cracks: list[CrackSpec] = Field(default_factory=_default_cracks)
    texture: TextureSpec = Field(default_factory=TextureSpec)
    camera: CameraModel = Field(default_factory=_default_camera)
    extrinsic: RigidPose = Field(
        default_factory=lambda: RigidPose(translation=(0.05, -0.02, 0.01))
    )
    perturbation: PerturbationSpec = Field(default_factory=PerturbationSpec)
    shots: list[ShotSpec] = Field(default_factory=list)
    sites: list[SiteSpec] = Field(default_factory=_default_sites)
    noise: float = Field(default=0.0, ge=0)
    frame_interval: float = Field(default=0.1, gt=0)


class SceneFrame(ArrayRecord):
    frame_id: str
    timestamp: float
    kind: Literal["survey", "site"]
    image: RasterImage
    mask: BinaryMask
    camera_pose: RigidPose


class SiteTruth(Record):
    site_id: str
    crack_id: str
    frame_id: str
    seed: Vec2
    point: Vec3
    width: float


class GroundTruth(ArrayRecord):
    """Oracle values of a generated scene.

    ``colors`` holds the noise-free rendered color of every cloud point and
    ``labels`` its crack membership.
    """

    spec: SceneSpec
    extrinsic: RigidPose
    camera_poses: dict[str, RigidPose]
    sites: list[SiteTruth]
    labels: np.ndarray
    colors: np.ndarray

    def reference_widths_mm(self) -> dict[str, float]:
        return {s.site_id: s.width * 1000.0 for s in self.sites}


class SyntheticScene(ArrayRecord):
    cloud: PointCloud
    trajectory: Trajectory
    frames: list[SceneFrame]
    camera: CameraModel
    extrinsic_init: RigidPose
    seeds: list[SeedEntry]
    ground_truth: GroundTruth

    def frame(self, frame_id: str) -> SceneFrame:
        for f in self.frames:
            if f.frame_id == frame_id:
                return f
        raise KeyError(frame_id)


class SceneLayout(Record):
    """Files written for a scene, all inside one directory."""

    root: Path
    cloud: Path
    cloud_gt: Path
    trajectory: Path
    extrinsic_true: Path
    extrinsic_init: Path
    camera: Path
    frames: Path
    seeds: Path
    widths: Path
    spec: Path

    @classmethod
    def in_directory(cls, root: str | Path) -> SceneLayout:
        root = Path(root)
        return cls(
            root=root,
            cloud=root / "cloud.ply",
            cloud_gt=root / "cloud_gt.ply",
            trajectory=root / "trajectory.txt",
            extrinsic_true=root / "extrinsic_true.txt",
            extrinsic_init=root / "extrinsic_init.txt",
            camera=root / "camera.yaml",
            frames=root / "frames.txt",
            seeds=root / "seeds.txt",
            widths=root / "widths.txt",
            spec=root / "scene.yaml",
        )
