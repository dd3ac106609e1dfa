from __future__ import annotations

from typing import Optional

import numpy as np
from pydantic import Field, field_validator, model_validator

from ..core.base import ArrayRecord, Record
from ..formats.schemas import RasterImage
from ..geometry.schemas import RigidPose


class JointHistogram(ArrayRecord):
    """Joint and marginal counts of (LiDAR intensity bin, image intensity bin)."""

    bins: np.ndarray
    marginal_lidar: np.ndarray
    marginal_image: np.ndarray
    total: int

    @classmethod
    def from_joint(cls, joint: np.ndarray) -> JointHistogram:
        joint = np.asarray(joint, dtype=np.int64)
        return cls(
            bins=joint,
            marginal_lidar=joint.sum(axis=1),
            marginal_image=joint.sum(axis=0),
            total=int(joint.sum()),
        )

    @model_validator(mode="after")
    def _marginals_consistent(self) -> JointHistogram:
        if self.bins.ndim != 2 or self.bins.shape[0] != self.bins.shape[1]:
            raise ValueError("joint histogram must be square")
        if not (
            np.array_equal(self.bins.sum(axis=1), self.marginal_lidar)
            and np.array_equal(self.bins.sum(axis=0), self.marginal_image)
            and int(self.bins.sum()) == self.total
        ):
            raise ValueError("marginals do not match the joint counts")
        return self

    @property
    def size(self) -> int:
        return self.bins.shape[0]


class NelderMeadConfig(Record):
    initial_step: tuple[float, ...] = (0.02, 0.02, 0.02, 0.02, 0.02, 0.02)
    max_iters: int = Field(default=400, ge=1)
    simplex_tolerance: float = Field(default=1e-5, gt=0)
    restarts: int = Field(default=1, ge=0)

    @field_validator("initial_step")
    @classmethod
    def _positive_steps(cls, v):
        if not v or any(s <= 0 for s in v):
            raise ValueError("initial steps must be positive")
        return v


class NelderMeadResult(Record):
    x: tuple[float, ...]
    fun: float
    iterations: int
    evaluations: int
    converged: bool
    history: list[float] = Field(default_factory=list)


class CalibrationConfig(Record):
    bins: int = Field(default=32, ge=2)
    optimizer: NelderMeadConfig = Field(default_factory=NelderMeadConfig)
    workers: int = Field(default=1, ge=1)


class CalibrationFrame(ArrayRecord):
    """One image with the LiDAR pose at its timestamp.

    The cloud is expressed in the world frame; ``lidar_pose`` maps LiDAR
    coordinates to world coordinates. Use the identity when the cloud is
    already in the LiDAR frame.
    """

    image: RasterImage
    lidar_pose: RigidPose = Field(default_factory=RigidPose)
    frame_id: Optional[str] = None


class CalibrationResult(Record):
    extrinsic: RigidPose
    initial: RigidPose
    nid_initial: float
    nid_final: float
    iterations: int
    evaluations: int
