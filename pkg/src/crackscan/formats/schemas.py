from __future__ import annotations

from pathlib import Path
from typing import Optional

import numpy as np
from numpy.typing import ArrayLike
from pydantic import field_validator, model_validator

from ..core.base import ArrayRecord, Record, RecordList
from ..exceptions import DimensionMismatch
from ..geometry.schemas import RigidPose


def _optional_array(v, dtype, width: Optional[int] = None):
    if v is None:
        return None
    arr = np.asarray(v, dtype=dtype)
    if width is None:
        return arr.reshape(-1)
    return arr.reshape(-1, width)


class PointCloud(ArrayRecord):
    """Ordered points with optional per-point attributes.

    Colors of points without any fused observation are ``(0, 0, 0)`` and
    carry ``support == 0``.
    """

    points: np.ndarray
    intensity: Optional[np.ndarray] = None
    intensity_max: Optional[float] = None
    color: Optional[np.ndarray] = None
    label: Optional[np.ndarray] = None
    support: Optional[np.ndarray] = None
    dropped: int = 0

    @field_validator("points", mode="before")
    @classmethod
    def _coerce_points(cls, v):
        return np.asarray(v, dtype=np.float64).reshape(-1, 3)

    @field_validator("intensity", mode="before")
    @classmethod
    def _coerce_intensity(cls, v):
        return _optional_array(v, np.float64)

    @field_validator("color", mode="before")
    @classmethod
    def _coerce_color(cls, v):
        return _optional_array(v, np.uint8, 3)

    @field_validator("label", "support", mode="before")
    @classmethod
    def _coerce_int(cls, v):
        return _optional_array(v, np.int64)

    @model_validator(mode="after")
    def _lengths_match(self) -> PointCloud:
        n = len(self.points)
        for name in ("intensity", "color", "label", "support"):
            arr = getattr(self, name)
            if arr is not None and len(arr) != n:
                raise ValueError(f"{name} has {len(arr)} entries for {n} points")
        return self

    def __len__(self) -> int:
        return len(self.points)

    @property
    def size(self) -> int:
        return len(self.points)

    def subset(self, selector: ArrayLike) -> PointCloud:
        """Cloud restricted to a boolean mask or an index array."""
        sel = np.asarray(selector)
        fields = {
            name: (arr[sel] if arr is not None else None)
            for name, arr in self._arrays().items()
        }
        return PointCloud(intensity_max=self.intensity_max, **fields)

    def with_points(self, points: ArrayLike) -> PointCloud:
        return self.model_copy(
            update={"points": np.asarray(points, dtype=np.float64).reshape(-1, 3)}
        )

    def with_attributes(self, **attributes) -> PointCloud:
        data = {**self._arrays(), "intensity_max": self.intensity_max}
        data.update(attributes)
        return PointCloud(**data)

    def normalized_intensity(self) -> np.ndarray:
        """Intensity scaled to [0, 1] by the largest recorded value."""
        if self.intensity is None:
            raise ValueError("cloud has no intensity")
        peak = float(self.intensity.max()) if len(self.intensity) else 0.0
        if peak <= 0.0:
            return np.zeros_like(self.intensity)
        return np.clip(self.intensity / peak, 0.0, 1.0)

    def _arrays(self) -> dict[str, Optional[np.ndarray]]:
        return {
            "points": self.points,
            "intensity": self.intensity,
            "color": self.color,
            "label": self.label,
            "support": self.support,
        }


class Trajectory(RecordList[RigidPose]):
    """Time-ordered poses with strictly increasing timestamps."""

    @model_validator(mode="after")
    def _strictly_increasing(self) -> Trajectory:
        times = [p.timestamp for p in self.root]
        if any(t is None for t in times):
            raise ValueError("every trajectory pose needs a timestamp")
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("trajectory timestamps must be strictly increasing")
        return self

    @property
    def timestamps(self) -> np.ndarray:
        return np.array([p.timestamp for p in self.root], dtype=np.float64)


class RasterImage(ArrayRecord):
    """8-bit image stored as a ``(height, width, channels)`` array."""

    pixels: np.ndarray
    timestamp: Optional[float] = None

    @field_validator("pixels", mode="before")
    @classmethod
    def _coerce_pixels(cls, v):
        arr = np.asarray(v)
        if arr.ndim == 2:
            arr = arr[:, :, None]
        if arr.ndim != 3 or arr.shape[2] not in (1, 3):
            raise ValueError("pixels must be (H, W), (H, W, 1) or (H, W, 3)")
        return np.ascontiguousarray(arr, dtype=np.uint8)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def channels(self) -> int:
        return self.pixels.shape[2]

    def gray(self) -> np.ndarray:
        """Single-channel ``(H, W)`` uint8 view (luma for RGB input)."""
        if self.channels == 1:
            return self.pixels[:, :, 0]
        rgb = self.pixels.astype(np.float64)
        luma = 0.299 * rgb[:, :, 0] + 0.587 * rgb[:, :, 1] + 0.114 * rgb[:, :, 2]
        return np.clip(np.floor(luma + 0.5), 0, 255).astype(np.uint8)

    def crop(self, rect: tuple[int, int, int, int]) -> RasterImage:
        u0, v0, w, h = rect
        return RasterImage(
            pixels=self.pixels[v0 : v0 + h, u0 : u0 + w], timestamp=self.timestamp
        )


class BinaryMask(ArrayRecord):
    """Boolean ``(height, width)`` grid; True marks crack pixels."""

    bits: np.ndarray

    @field_validator("bits", mode="before")
    @classmethod
    def _coerce_bits(cls, v):
        arr = np.asarray(v)
        if arr.ndim != 2:
            raise ValueError("mask bits must be a 2D grid")
        return np.ascontiguousarray(arr.astype(bool))

    @classmethod
    def empty(cls, width: int, height: int) -> BinaryMask:
        return cls(bits=np.zeros((height, width), dtype=bool))

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    @property
    def height(self) -> int:
        return self.bits.shape[0]

    @property
    def area(self) -> int:
        return int(self.bits.sum())

    def crop(self, rect: tuple[int, int, int, int]) -> BinaryMask:
        u0, v0, w, h = rect
        return BinaryMask(bits=self.bits[v0 : v0 + h, u0 : u0 + w])

    def check_dimensions(self, width: int, height: int) -> None:
        if (self.width, self.height) != (width, height):
            raise DimensionMismatch(
                f"Mask is {self.width}x{self.height}, expected {width}x{height}."
            )


class FrameEntry(Record):
    """One line of a frames file; paths are resolved against the file."""

    frame_id: str
    timestamp: float
    image: Path
    mask: Optional[Path] = None


class SeedEntry(Record):
    crack_id: str
    u: float
    v: float
    frame_id: str
