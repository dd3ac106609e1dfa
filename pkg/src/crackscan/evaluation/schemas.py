from typing import Optional

import numpy as np
from pydantic import Field, field_validator

from ..core.base import ArrayRecord, Record
from ..metrology.schemas import ErrorStats


class ConfusionCounts(ArrayRecord):
    """``matrix[i, j]`` counts pixels of true class ``i`` predicted as ``j``.

    Class 0 is background, class 1 is crack.
    """

    matrix: np.ndarray

    @field_validator("matrix", mode="before")
    @classmethod
    def _coerce(cls, v):
        m = np.asarray(v, dtype=np.int64)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or np.any(m < 0):
            raise ValueError("confusion counts must be a square non-negative matrix")
        return m

    @property
    def total(self) -> int:
        return int(self.matrix.sum())

    def iou(self) -> np.ndarray:
        """Per-class IoU; a class absent from both masks scores 1."""
        inter = np.diag(self.matrix).astype(np.float64)
        union = self.matrix.sum(axis=0) + self.matrix.sum(axis=1) - inter
        return np.where(union > 0, inter / np.maximum(union, 1), 1.0)


class StatSummary(Record):
    mean: float
    std: float
    count: int
    skipped: int = 0


class EvaluationReport(Record):
    """Table-style quality summary of a run. Lengths are in meters."""

    density: Optional[StatSummary] = None
    density_radius: float = 0.01
    roughness: Optional[StatSummary] = None
    roughness_radius: float = 0.01
    miou: Optional[float] = None
    class_iou: Optional[list[float]] = None
    geometry_error: Optional[float] = None
    width_errors: Optional[ErrorStats] = None
    notes: list[str] = Field(default_factory=list)
