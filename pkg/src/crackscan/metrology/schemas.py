from __future__ import annotations

from typing import Optional

import numpy as np
from pydantic import ConfigDict, Field, model_validator

from ..core.base import ArrayRecord, Record
from ..formats.schemas import BinaryMask
from ..geometry.schemas import RigidPose

Vec2 = tuple[float, float]
Vec3 = tuple[float, float, float]


class LocalPlane(Record):
    """Plane ``a x + b y + c z + d = 0`` with unit normal ``(a, b, c)``."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    a: float
    b: float
    c: float
    d: float
    rms: float = 0.0
    support: int = 0

    @model_validator(mode="before")
    @classmethod
    def _unit_normal(cls, data):
        if isinstance(data, dict) and all(k in data for k in "abcd"):
            n = np.array([data["a"], data["b"], data["c"]], dtype=np.float64)
            norm = float(np.linalg.norm(n))
            if norm == 0.0 or not np.isfinite(norm):
                raise ValueError("plane normal must be non-zero and finite")
            data = {
                **data,
                "a": float(n[0] / norm),
                "b": float(n[1] / norm),
                "c": float(n[2] / norm),
                "d": float(data["d"]) / norm,
            }
        return data

    @property
    def normal(self) -> np.ndarray:
        return np.array([self.a, self.b, self.c])

    def signed_distance(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=np.float64).reshape(-1, 3)
        return pts @ self.normal + self.d

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.a, self.b, self.c, self.d)


class MetrologyParams(Record):
    """Tunables of the width measurement."""

    window: int = Field(default=15, ge=3)
    sigma: float = Field(default=1.5, gt=0)
    snap_radius: float = Field(default=2.0, ge=0)
    trace_step: float = Field(default=0.25, gt=0)
    plane_neighbors: int = Field(default=60, ge=3)
    ray_hit_radius: float = Field(default=0.01, gt=0)
    ray_max_distance: float = Field(default=0.1, gt=0)
    sample_step: float = Field(default=1e-4, gt=0)
    sample_radius: float = Field(default=0.03, gt=0)
    refine_levels: int = Field(default=1, ge=0)


class CrackMeasurement(Record):
    crack_id: str
    frame_id: str
    seed: Vec2
    direction: Vec2
    edge_left_2d: Vec2
    edge_right_2d: Vec2
    edge_left_3d: Vec3
    edge_right_3d: Vec3
    width: float
    plane: tuple[float, float, float, float]
    plane_rms: float = 0.0
    location_3d: Optional[Vec3] = None
    pixel_error_left: float = 0.0
    pixel_error_right: float = 0.0

    @model_validator(mode="after")
    def _width_matches_edges(self) -> CrackMeasurement:
        expected = edge_distance(self.edge_left_3d, self.edge_right_3d)
        if self.width != expected:
            raise ValueError("width must equal the distance between the 3D edges")
        return self

    @property
    def width_mm(self) -> float:
        return self.width * 1000.0


def edge_distance(left, right) -> float:
    return float(np.linalg.norm(np.subtract(left, right, dtype=np.float64)))


class MetrologyFrame(ArrayRecord):
    """Mask, optional precomputed skeleton and camera-to-world pose of one
    measurement view."""

    frame_id: str
    mask: BinaryMask
    camera_pose: RigidPose
    skeleton: Optional[BinaryMask] = None


class EdgeMatch(Record):
    point: Vec3
    pixel_error: float


class SiteFailure(Record):
    crack_id: str
    frame_id: str
    stage: Optional[str] = None
    message: str


class SiteResults(Record):
    measurements: list[CrackMeasurement] = Field(default_factory=list)
    failures: list[SiteFailure] = Field(default_factory=list)


class ErrorStats(Record):
    """Mean absolute error (mm) and mean relative error (%) of widths."""

    mae_mm: float
    mre_percent: float
    count: int
