from __future__ import annotations

from typing import Literal, NamedTuple, Optional

import numpy as np
from pydantic import Field

from ..core.base import ArrayRecord, Record
from ..formats.schemas import PointCloud


SorMode = Literal["upper", "symmetric", "gaussian"]


class SorConfig(Record):
    k: int = Field(default=60, ge=1)
    n_sigma: float = Field(default=1.0, ge=0)
    mode: SorMode = "upper"


class SorResult(NamedTuple):
    kept: PointCloud
    removed_indices: np.ndarray


class MlsConfig(Record):
    """Moving-least-squares settings.

    ``search_radius`` of None means five times the median nearest-neighbor
    spacing of the cloud being smoothed. ``view_direction`` points from the
    surface toward the sensor and orients local normals.
    """

    search_radius: Optional[float] = Field(default=None, gt=0)
    polynomial_degree: int = Field(default=2, ge=1, le=3)
    view_direction: Optional[tuple[float, float, float]] = None
    workers: int = Field(default=1, ge=1)


class MlsSurface(ArrayRecord):
    """Local polynomial height field over a weighted-PCA reference plane.

    ``frame`` rows are the two tangent axes and the normal.
    """

    origin: np.ndarray
    frame: np.ndarray
    degree: int
    terms: list[tuple[int, int]]
    coefficients: np.ndarray
    support: int

    @property
    def normal(self) -> np.ndarray:
        return self.frame[2]

    def coefficient(self, i: int, j: int) -> float:
        return float(self.coefficients[self.terms.index((i, j))])

    def height(self, x: float, y: float) -> float:
        return float(
            sum(c * x**i * y**j for c, (i, j) in zip(self.coefficients, self.terms))
        )

    def project(self, point) -> np.ndarray:
        """Move ``point`` along the local normal onto the polynomial."""
        rel = np.asarray(point, dtype=np.float64) - self.origin
        x, y = float(rel @ self.frame[0]), float(rel @ self.frame[1])
        return (
            self.origin
            + x * self.frame[0]
            + y * self.frame[1]
            + self.height(x, y) * self.frame[2]
        )


class MlsResult(ArrayRecord):
    cloud: PointCloud
    fallback_count: int
    radius: float


class CropBox(Record):
    min_corner: tuple[float, float, float]
    max_corner: tuple[float, float, float]


class DenoiseConfig(Record):
    sor: SorConfig = Field(default_factory=SorConfig)
    mls: MlsConfig = Field(default_factory=MlsConfig)
    crop: Optional[CropBox] = None
    smooth: bool = True
