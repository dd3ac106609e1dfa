from __future__ import annotations

import math
from typing import Optional

import numpy as np
from numpy.typing import ArrayLike, NDArray
from pydantic import ConfigDict, Field, field_validator, model_validator

from ..core.base import Record
from . import quaternion as quat

Point3 = NDArray[np.float64]


class RigidPose(Record):
    """Rigid transform ``p -> R p + t`` stored as a unit quaternion and vector.

    ``a.compose(b)`` applies ``b`` first, then ``a``.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    rotation: tuple[float, float, float, float] = quat.IDENTITY
    translation: tuple[float, float, float] = (0.0, 0.0, 0.0)
    timestamp: Optional[float] = None

    @field_validator("rotation", mode="before")
    @classmethod
    def _normalize_rotation(cls, v):
        return tuple(float(c) for c in quat.normalize(v))

    @field_validator("translation", mode="before")
    @classmethod
    def _finite_translation(cls, v):
        t = np.asarray(v, dtype=np.float64)
        if t.shape != (3,) or not np.all(np.isfinite(t)):
            raise ValueError("translation must be a finite 3-vector")
        return tuple(float(c) for c in t)

    @classmethod
    def identity(cls, timestamp: Optional[float] = None) -> RigidPose:
        return cls(timestamp=timestamp)

    @classmethod
    def from_matrix(
        cls, matrix: ArrayLike, timestamp: Optional[float] = None
    ) -> RigidPose:
        m = np.asarray(matrix, dtype=np.float64)
        return cls(
            rotation=quat.from_matrix(m[:3, :3]),
            translation=m[:3, 3],
            timestamp=timestamp,
        )

    @classmethod
    def from_rotvec(
        cls,
        rotvec: ArrayLike,
        translation: ArrayLike = (0.0, 0.0, 0.0),
        timestamp: Optional[float] = None,
    ) -> RigidPose:
        return cls(
            rotation=quat.from_rotvec(rotvec),
            translation=translation,
            timestamp=timestamp,
        )

    @classmethod
    def look_at(
        cls,
        eye: ArrayLike,
        target: ArrayLike,
        up: ArrayLike = (0.0, 0.0, 1.0),
        timestamp: Optional[float] = None,
    ) -> RigidPose:
        """Camera-to-world pose of a camera at ``eye`` looking at ``target``.

        Camera axes follow the image convention: +z along the optical axis,
        +x to the right and +y downwards in the image. When the viewing
        direction is parallel to ``up`` the world +y axis is used instead.
        """
        eye = np.asarray(eye, dtype=np.float64)
        z = np.asarray(target, dtype=np.float64) - eye
        norm = np.linalg.norm(z)
        if norm < 1e-12:
            raise ValueError("eye and target coincide")
        z = z / norm
        up_v = np.asarray(up, dtype=np.float64)
        down = -(up_v - np.dot(up_v, z) * z)
        if np.linalg.norm(down) < 1e-9:
            up_v = np.array([0.0, 1.0, 0.0])
            down = -(up_v - np.dot(up_v, z) * z)
        y = down / np.linalg.norm(down)
        x = np.cross(y, z)
        rot = np.column_stack([x, y, z])
        return cls(rotation=quat.from_matrix(rot), translation=eye, timestamp=timestamp)

    @property
    def rotation_array(self) -> NDArray[np.float64]:
        return np.asarray(self.rotation, dtype=np.float64)

    @property
    def translation_array(self) -> NDArray[np.float64]:
        return np.asarray(self.translation, dtype=np.float64)

    def rotation_matrix(self) -> NDArray[np.float64]:
        return quat.to_matrix(self.rotation)

    def matrix(self) -> NDArray[np.float64]:
        m = np.eye(4)
        m[:3, :3] = self.rotation_matrix()
        m[:3, 3] = self.translation
        return m

    def rotvec(self) -> NDArray[np.float64]:
        return quat.to_rotvec(self.rotation)

    def compose(self, other: RigidPose) -> RigidPose:
        r = quat.multiply(self.rotation, other.rotation)
        t = self.rotation_matrix() @ other.translation_array + self.translation_array
        return RigidPose(rotation=r, translation=t, timestamp=self.timestamp)

    def inverse(self) -> RigidPose:
        conj = quat.conjugate(self.rotation)
        t = -(quat.to_matrix(conj) @ self.translation_array)
        return RigidPose(rotation=conj, translation=t, timestamp=self.timestamp)

    def with_timestamp(self, timestamp: Optional[float]) -> RigidPose:
        return self.model_copy(update={"timestamp": timestamp})

    def rotation_angle_to(self, other: RigidPose) -> float:
        return quat.angle_between(self.rotation, other.rotation)

    def translation_distance_to(self, other: RigidPose) -> float:
        return float(np.linalg.norm(self.translation_array - other.translation_array))

    @property
    def optical_axis(self) -> NDArray[np.float64]:
        """World direction of the rotated +z axis."""
        return self.rotation_matrix()[:, 2]


class CameraModel(Record):
    """Undistorted pinhole camera."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    fx: float = Field(gt=0)
    fy: float = Field(gt=0)
    cx: float = Field(ge=0)
    cy: float = Field(ge=0)
    width: int = Field(gt=0)
    height: int = Field(gt=0)

    @model_validator(mode="after")
    def _principal_point_in_image(self) -> CameraModel:
        if not (self.cx < self.width and self.cy < self.height):
            raise ValueError("principal point must lie inside the image")
        if not all(math.isfinite(v) for v in (self.fx, self.fy, self.cx, self.cy)):
            raise ValueError("intrinsics must be finite")
        return self

    def intrinsic_matrix(self) -> NDArray[np.float64]:
        return np.array(
            [[self.fx, 0.0, self.cx], [0.0, self.fy, self.cy], [0.0, 0.0, 1.0]]
        )

    def pixel_in_frame(self, u: ArrayLike, v: ArrayLike) -> NDArray[np.bool_]:
        """True where the nearest pixel of ``(u, v)`` exists in the image."""
        u = np.asarray(u, dtype=np.float64)
        v = np.asarray(v, dtype=np.float64)
        return (
            (u >= -0.5) & (u < self.width - 0.5) & (v >= -0.5) & (v < self.height - 0.5)
        )
