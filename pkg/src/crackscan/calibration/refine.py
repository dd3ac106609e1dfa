import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Optional, Sequence

import numpy as np

from ..exceptions import DegenerateJoint, NoVisiblePoints
from ..formats.schemas import PointCloud
from ..geometry.schemas import CameraModel, RigidPose
from .histogram import build_histograms, nid
from .nelder_mead import nelder_mead_minimize
from .schemas import CalibrationConfig, CalibrationFrame, CalibrationResult

log = logging.getLogger(__name__)


def perturb(initial: RigidPose, x: Sequence[float]) -> RigidPose:
    """Compose the perturbation ``(rotation vector, translation)`` onto
    ``initial``."""
    delta = RigidPose.from_rotvec(x[:3], x[3:6])
    return delta.compose(initial)


def mean_nid(
    cloud: PointCloud,
    frames: Sequence[CalibrationFrame],
    cam: CameraModel,
    extrinsic: RigidPose,
    bins: int,
) -> float:
    """Mean NID over frames; a frame with a degenerate joint scores 1."""
    values = []
    for frame in frames:
        cam_from_world = extrinsic.compose(frame.lidar_pose.inverse())
        hist = build_histograms(cloud, frame.image, cam, cam_from_world, bins)
        try:
            values.append(nid(hist))
        except DegenerateJoint:
            values.append(1.0)
    return float(np.mean(values))


def refine_extrinsic(
    cloud: PointCloud,
    frames: Sequence[CalibrationFrame],
    cam: CameraModel,
    initial: RigidPose,
    cfg: Optional[CalibrationConfig] = None,
) -> CalibrationResult:
    """Refine the LiDAR-to-camera extrinsic by minimizing the mean NID.

    Vertices at which no point is visible score 1 (the worst NID); at the
    initial estimate the error propagates. The returned extrinsic never has
    a higher mean NID than ``initial``.
    """
    cfg = cfg or CalibrationConfig()
    if not frames:
        raise NoVisiblePoints("No calibration frames were given.")

    nid_initial = mean_nid(cloud, frames, cam, initial, cfg.bins)
    log.info(f"Initial mean NID over {len(frames)} frames: {nid_initial:.6f}")

    def objective(x: np.ndarray) -> float:
        if not np.any(x):
            return nid_initial
        try:
            return mean_nid(cloud, frames, cam, perturb(initial, x), cfg.bins)
        except NoVisiblePoints:
            return 1.0

    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            result = nelder_mead_minimize(
                objective, np.zeros(6), cfg.optimizer, map_fn=pool.map
            )
    else:
        result = nelder_mead_minimize(objective, np.zeros(6), cfg.optimizer)

    if result.fun <= nid_initial:
        extrinsic = perturb(initial, result.x)
        nid_final = result.fun
    else:
        extrinsic, nid_final = initial, nid_initial
    extrinsic = extrinsic.with_timestamp(initial.timestamp)

    log.info(
        "Refined mean NID %.6f -> %.6f (%d iterations, %d evaluations)",
        nid_initial,
        nid_final,
        result.iterations,
        result.evaluations,
    )
    return CalibrationResult(
        extrinsic=extrinsic,
        initial=initial,
        nid_initial=nid_initial,
        nid_final=nid_final,
        iterations=result.iterations,
        evaluations=result.evaluations,
    )
