from __future__ import annotations

from typing import Optional

import numpy as np
from pydantic import Field, field_validator

from ..core.base import ArrayRecord, Record
from ..formats.schemas import BinaryMask, RasterImage

Rect = tuple[int, int, int, int]


class PromptSet(ArrayRecord):
    """Prompt pixels ``(u, v)``, their cluster ids (-1 = noise) and one crop
    rectangle ``(u0, v0, w, h)`` per cluster id."""

    points: np.ndarray
    cluster_ids: np.ndarray
    crop_rects: list[Rect] = Field(default_factory=list)

    @field_validator("points", mode="before")
    @classmethod
    def _coerce_points(cls, v):
        return np.asarray(v, dtype=np.int64).reshape(-1, 2)

    @field_validator("cluster_ids", mode="before")
    @classmethod
    def _coerce_ids(cls, v):
        return np.asarray(v, dtype=np.int64).reshape(-1)

    def members(self, cluster_id: int) -> np.ndarray:
        return self.points[self.cluster_ids == cluster_id]


class QualityVerdict(Record):
    hole_count: int = Field(ge=0)
    size_ratio: float = Field(ge=0)
    accepted: bool
    reason: Optional[str] = None


class MaskParams(Record):
    """Prompt generation and quality-gate settings."""

    k: int = Field(default=20, ge=1)
    min_dist: float = Field(default=15.0, ge=0)
    eps: float = Field(default=25.0, gt=0)
    min_pts: int = Field(default=3, ge=1)
    dilation: int = Field(default=32, ge=0)
    max_size_ratio: float = Field(default=3.0, gt=0)
    max_holes: int = Field(default=2, ge=0)
    concurrency: int = Field(default=4, ge=1)


class RefineRequest(ArrayRecord):
    """Input to a refiner: an image crop, prompts in crop coordinates and the
    base mask over the same crop."""

    image: RasterImage
    prompts: np.ndarray
    rect: Rect
    prior: BinaryMask

    @field_validator("prompts", mode="before")
    @classmethod
    def _coerce_prompts(cls, v):
        return np.asarray(v, dtype=np.int64).reshape(-1, 2)


class CropOutcome(Record):
    rect: Rect
    verdict: Optional[QualityVerdict] = None
    error: Optional[str] = None


class MaskRefinement(ArrayRecord):
    mask: BinaryMask
    prompts: PromptSet
    outcomes: list[CropOutcome] = Field(default_factory=list)

    @property
    def accepted(self) -> int:
        return sum(1 for o in self.outcomes if o.verdict and o.verdict.accepted)
