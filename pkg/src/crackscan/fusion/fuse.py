"""Multi-view color and crack-label fusion onto a point cloud."""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Optional, Sequence

import numpy as np

from ..exceptions import ValidationError
from ..formats.schemas import PointCloud
from ..geometry.operations import project_points, transform_points
from ..geometry.schemas import CameraModel, RigidPose
from .schemas import (
    FusedPoint,
    FusionConfig,
    FusionFrame,
    KeyframeConfig,
    ObservationTable,
    ViewObservation,
)
from .visibility import hpr_visible

log = logging.getLogger(__name__)

HIGHLIGHT_COLOR = (255, 0, 0)


def _frame_observations(
    cloud: PointCloud,
    frame: FusionFrame,
    cam: CameraModel,
    cfg: FusionConfig,
) -> Optional[dict[str, np.ndarray]]:
    pc = transform_points(frame.camera_pose.inverse(), cloud.points)
    uv, in_front = project_points(cam, pc)
    in_frame = np.zeros(len(pc), dtype=bool)
    in_frame[in_front] = cam.pixel_in_frame(uv[in_front, 0], uv[in_front, 1])
    candidates = np.flatnonzero(in_frame)
    if cfg.use_hpr and len(candidates) >= 4:
        visible = hpr_visible(pc[candidates], np.zeros(3), cfg.hpr_radius_scale)
        candidates = candidates[visible]
    if len(candidates) == 0:
        log.warning("Frame %s sees no point of the cloud", frame.frame_id)
        return None

    cols = np.floor(uv[candidates, 0] + 0.5).astype(np.int64)
    rows = np.floor(uv[candidates, 1] + 0.5).astype(np.int64)
    pixels = frame.image.pixels[rows, cols]
    color = pixels if pixels.shape[1] == 3 else np.repeat(pixels, 3, axis=1)
    if frame.mask is not None:
        label = frame.mask.bits[rows, cols].astype(np.int64)
    else:
        label = np.full(len(candidates), -1, dtype=np.int64)

    dist = np.linalg.norm(pc[candidates], axis=1)
    s_orient = pc[candidates, 2] / dist
    s_dist = np.exp(-((dist - cfg.ideal_distance) ** 2) / (2.0 * cfg.sigma**2))
    log.debug("Frame %s observes %d points", frame.frame_id, len(candidates))
    return {
        "point_index": candidates,
        "uv": uv[candidates],
        "color": color,
        "label": label,
        "score_orientation": s_orient,
        "score_distance": s_dist,
        "weight": cfg.orientation_weight * s_orient + cfg.distance_weight * s_dist,
    }


def accumulate_observations(
    cloud: PointCloud,
    frames: Sequence[FusionFrame],
    cam: CameraModel,
    cfg: Optional[FusionConfig] = None,
) -> ObservationTable:
    """Record, for every frame, the color, label and view scores of each
    point the frame sees.

    Points are filtered to the camera frustum and then by hidden-point
    removal; colors and labels are read at the nearest pixel.
    """
    cfg = cfg or FusionConfig()
    frame_ids = [f.frame_id for f in frames]
    for frame in frames:
        if (frame.image.width, frame.image.height) != (cam.width, cam.height):
            raise ValidationError(
                f"Frame {frame.frame_id} is {frame.image.width}x{frame.image.height}, "
                f"camera is {cam.width}x{cam.height}."
            )

    def observe(frame: FusionFrame):
        return _frame_observations(cloud, frame, cam, cfg)

    if cfg.workers > 1 and len(frames) > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            per_frame = list(pool.map(observe, frames))
    else:
        per_frame = [observe(f) for f in frames]

    parts = [(i, obs) for i, obs in enumerate(per_frame) if obs is not None]
    if not parts:
        return ObservationTable.empty(len(cloud), frame_ids)

    def column(name: str) -> np.ndarray:
        return np.concatenate([obs[name] for _, obs in parts])

    return ObservationTable(
        point_count=len(cloud),
        frame_ids=frame_ids,
        point_index=column("point_index"),
        frame_index=np.concatenate(
            [np.full(len(obs["point_index"]), i) for i, obs in parts]
        ),
        uv=column("uv"),
        color=column("color"),
        label=column("label"),
        score_orientation=column("score_orientation"),
        score_distance=column("score_distance"),
        weight=column("weight"),
    )


def _fuse_arrays(
    frame_ids: Sequence[str],
    colors: np.ndarray,
    labels: np.ndarray,
    weights: np.ndarray,
    top_n: int,
) -> FusedPoint:
    if len(weights) == 0:
        return FusedPoint(color=None, label=0, support=0)
    order = sorted(range(len(weights)), key=lambda i: (-weights[i], frame_ids[i]))
    keep = np.asarray(order[:top_n])
    w = np.clip(np.asarray(weights, dtype=np.float64)[keep], 0.0, None)
    if w.sum() <= 0:
        w = np.ones(len(keep))

    c = np.asarray(colors, dtype=np.float64)[keep]
    color = np.clip(np.floor(w @ c / w.sum() + 0.5), 0, 255).astype(int)

    lab = np.asarray(labels)[keep]
    known = lab >= 0
    label = 0
    if np.any(known):
        wk = w[known] if w[known].sum() > 0 else np.ones(int(known.sum()))
        vote = float(wk @ lab[known] / wk.sum())
        label = int(vote >= 0.5)
    return FusedPoint(
        color=(int(color[0]), int(color[1]), int(color[2])),
        label=label,
        support=len(keep),
    )


def fuse_point(
    observations: Sequence[ViewObservation], cfg: Optional[FusionConfig] = None
) -> FusedPoint:
    """Weighted color average and crack vote over the ``top_n`` best views.

    Views are ranked by weight, ties broken by frame id, so the result does
    not depend on the order of ``observations``.
    """
    cfg = cfg or FusionConfig()
    return _fuse_arrays(
        [o.frame_id for o in observations],
        np.array([o.color for o in observations], dtype=np.float64).reshape(-1, 3),
        np.array(
            [o.label if o.label is not None else -1 for o in observations],
            dtype=np.int64,
        ),
        np.array([o.weight for o in observations], dtype=np.float64),
        cfg.top_n,
    )


def fuse_cloud(
    cloud: PointCloud,
    frames: Sequence[FusionFrame],
    cam: CameraModel,
    cfg: Optional[FusionConfig] = None,
) -> PointCloud:
    """Colorize and crack-label ``cloud`` from the given views.

    Points no view sees keep color ``(0, 0, 0)``, label 0 and support 0.
    """
    cfg = cfg or FusionConfig()
    table = accumulate_observations(cloud, frames, cam, cfg)
    n = len(cloud)
    color = np.zeros((n, 3), dtype=np.uint8)
    label = np.zeros(n, dtype=np.int64)
    support = np.zeros(n, dtype=np.int64)

    order = np.argsort(table.point_index, kind="stable")
    idx = table.point_index[order]
    starts = np.flatnonzero(np.r_[True, idx[1:] != idx[:-1]]) if len(idx) else []
    bounds = list(starts) + [len(idx)]
    for start, stop in zip(bounds[:-1], bounds[1:]):
        rows = order[start:stop]
        fused = _fuse_arrays(
            [table.frame_ids[f] for f in table.frame_index[rows]],
            table.color[rows],
            table.label[rows],
            table.weight[rows],
            cfg.top_n,
        )
        point = idx[start]
        color[point] = fused.color
        label[point] = fused.label
        support[point] = fused.support

    colored = int(np.count_nonzero(support))
    log.info(
        "Fused %d frames: %d of %d points colored, %d labeled crack",
        len(frames),
        colored,
        n,
        int(label.sum()),
    )
    return cloud.with_attributes(color=color, label=label, support=support)


def select_keyframes(
    poses: Sequence[RigidPose], cfg: Optional[KeyframeConfig] = None
) -> list[int]:
    """Indices of frames that moved enough since the last kept frame.

    The first frame is always kept; a later frame is kept when its
    translation or rotation angle to the previous keyframe reaches the
    configured minimum.
    """
    cfg = cfg or KeyframeConfig()
    if not poses:
        return []
    kept = [0]
    for i, pose in enumerate(poses[1:], start=1):
        last = poses[kept[-1]]
        if (
            pose.translation_distance_to(last) >= cfg.min_translation
            or pose.rotation_angle_to(last) >= cfg.min_rotation
        ):
            kept.append(i)
    log.debug("Selected %d keyframes of %d", len(kept), len(poses))
    return kept


def highlight_cracks(
    cloud: PointCloud, color: tuple[int, int, int] = HIGHLIGHT_COLOR
) -> PointCloud:
    """Paint crack-labeled points with ``color``."""
    if cloud.label is None:
        raise ValidationError("The cloud carries no crack labels.")
    base = (
        cloud.color.copy()
        if cloud.color is not None
        else np.zeros((len(cloud), 3), dtype=np.uint8)
    )
    base[cloud.label == 1] = np.asarray(color, dtype=np.uint8)
    return cloud.with_attributes(color=base)
