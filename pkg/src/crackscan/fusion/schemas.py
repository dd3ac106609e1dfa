from __future__ import annotations

from typing import NamedTuple, Optional

import numpy as np
from pydantic import ConfigDict, Field, field_validator, model_validator

from ..core.base import ArrayRecord, Record
from ..formats.schemas import BinaryMask, RasterImage
from ..geometry.schemas import RigidPose


class FusionConfig(Record):
    """Weights and limits for multi-view color and label fusion.

    A view's weight is ``orientation_weight * score_orientation +
    distance_weight * score_distance``.
    """

    orientation_weight: float = Field(default=0.5, ge=0)
    distance_weight: float = Field(default=0.5, ge=0)
    ideal_distance: float = Field(default=2.0, ge=0)
    sigma: float = Field(default=0.5, gt=0)
    top_n: int = Field(default=4, ge=1)
    hpr_radius_scale: float = Field(default=1000.0, gt=1)
    use_hpr: bool = True
    workers: int = Field(default=1, ge=1)

    @model_validator(mode="after")
    def _weights_positive(self) -> FusionConfig:
        if self.orientation_weight + self.distance_weight <= 0:
            raise ValueError("orientation_weight + distance_weight must be positive")
        return self


class KeyframeConfig(Record):
    min_translation: float = Field(default=0.1, ge=0)
    min_rotation: float = Field(default=0.087, ge=0)


class FusionFrame(ArrayRecord):
    """One camera view: image, optional crack mask and camera-to-world pose."""

    frame_id: str
    image: RasterImage
    camera_pose: RigidPose
    mask: Optional[BinaryMask] = None

    @model_validator(mode="after")
    def _mask_matches_image(self) -> FusionFrame:
        if self.mask is not None:
            self.mask.check_dimensions(self.image.width, self.image.height)
        return self


class ViewObservation(Record):
    """What one frame saw of one point.

    ``label`` is None when the frame has no mask.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    frame_id: str
    color: tuple[int, int, int]
    label: Optional[int] = None
    score_orientation: float
    score_distance: float
    weight: float


class ObservationTable(ArrayRecord):
    """Column-wise observations of all points over all frames.

    Row ``r`` says that point ``point_index[r]`` was seen in frame
    ``frame_ids[frame_index[r]]``. Unknown labels are stored as -1.
    """

    point_count: int
    frame_ids: list[str]
    point_index: np.ndarray
    frame_index: np.ndarray
    uv: np.ndarray
    color: np.ndarray
    label: np.ndarray
    score_orientation: np.ndarray
    score_distance: np.ndarray
    weight: np.ndarray

    @field_validator("point_index", "frame_index", "label", mode="before")
    @classmethod
    def _coerce_int(cls, v):
        return np.asarray(v, dtype=np.int64).reshape(-1)

    @field_validator("color", mode="before")
    @classmethod
    def _coerce_color(cls, v):
        return np.asarray(v, dtype=np.uint8).reshape(-1, 3)

    @field_validator("uv", mode="before")
    @classmethod
    def _coerce_uv(cls, v):
        return np.asarray(v, dtype=np.float64).reshape(-1, 2)

    @classmethod
    def empty(cls, point_count: int, frame_ids: list[str]) -> ObservationTable:
        return cls(
            point_count=point_count,
            frame_ids=frame_ids,
            point_index=[],
            frame_index=[],
            uv=np.empty((0, 2)),
            color=np.empty((0, 3)),
            label=[],
            score_orientation=np.empty(0),
            score_distance=np.empty(0),
            weight=np.empty(0),
        )

    def __len__(self) -> int:
        return len(self.point_index)

    def counts(self) -> np.ndarray:
        """Number of observations per point."""
        return np.bincount(self.point_index, minlength=self.point_count)

    def for_point(self, index: int) -> list[ViewObservation]:
        rows = np.flatnonzero(self.point_index == index)
        return [self._observation(r) for r in rows]

    def _observation(self, row: int) -> ViewObservation:
        label = int(self.label[row])
        return ViewObservation(
            frame_id=self.frame_ids[self.frame_index[row]],
            color=tuple(int(c) for c in self.color[row]),
            label=label if label >= 0 else None,
            score_orientation=float(self.score_orientation[row]),
            score_distance=float(self.score_distance[row]),
            weight=float(self.weight[row]),
        )


class FusedPoint(NamedTuple):
    color: Optional[tuple[int, int, int]]
    label: int
    support: int
