"""Stage bodies of the workflow.

Each stage is a plain function (or coroutine) over loaded data; the runner
declares them as ``StageOperation`` objects and executes them in order.
"""

import logging
from typing import Optional

import numpy as np

from ..calibration.refine import refine_extrinsic
from ..calibration.schemas import (
    CalibrationConfig,
    CalibrationFrame,
    CalibrationResult,
)
from ..denoise.crop import crop_box
from ..denoise.mls import mls_smooth
from ..denoise.schemas import DenoiseConfig
from ..denoise.sor import sor_filter
from ..evaluation.metrics import (
    confusion_counts,
    dimension_error,
    point_surface_density,
    surface_roughness,
)
from ..evaluation.schemas import ConfusionCounts, EvaluationReport
from ..exceptions import CrackscanError, EmptySkeleton, NoClusters
from ..formats.cloud import load_point_cloud
from ..formats.listings import (
    load_camera,
    load_frames,
    load_reference_widths,
    load_seeds,
)
from ..formats.raster import load_image, load_mask
from ..formats.schemas import BinaryMask, PointCloud
from ..formats.trajectory import load_pose, load_trajectory
from ..fusion.fuse import fuse_cloud
from ..fusion.schemas import FusionConfig, FusionFrame
from ..geometry.operations import camera_pose_from_lidar, interpolate_camera_pose
from ..geometry.schemas import RigidPose
from ..masks.pipeline import refine_mask
from ..masks.refiners import get_refiner
from ..metrology.measure import compute_error_stats, measure_sites
from ..metrology.schemas import MetrologyFrame, MetrologyParams, SiteResults
from .schemas import (
    DenoiseSummary,
    EvaluationConfig,
    FrameData,
    MaskStageConfig,
    PathsConfig,
    PipelineInputs,
)

log = logging.getLogger(__name__)

__all__ = [
    "calibrate",
    "camera_poses",
    "denoise",
    "evaluate",
    "fuse",
    "fusion_frames",
    "load_inputs",
    "measure",
    "metrology_frames",
    "refine_masks",
]


def load_inputs(paths: PathsConfig) -> PipelineInputs:
    """Read every input file named in ``paths``."""
    frames = []
    for entry in load_frames(paths.frames):
        image = load_image(entry.image, timestamp=entry.timestamp)
        mask = load_mask(entry.mask, like=image) if entry.mask is not None else None
        frames.append(
            FrameData(
                frame_id=entry.frame_id,
                timestamp=entry.timestamp,
                image=image,
                mask=mask,
            )
        )

    gt_masks = {}
    if paths.ground_truth_masks is not None:
        for entry in load_frames(paths.ground_truth_masks):
            if entry.mask is not None:
                gt_masks[entry.frame_id] = load_mask(entry.mask)

    inputs = PipelineInputs(
        cloud=load_point_cloud(paths.cloud),
        trajectory=load_trajectory(paths.trajectory),
        camera=load_camera(paths.camera),
        extrinsic=load_pose(paths.extrinsic),
        frames=frames,
        seeds=load_seeds(paths.seeds) if paths.seeds else [],
        reference_widths=(
            load_reference_widths(paths.reference_widths)
            if paths.reference_widths
            else {}
        ),
        ground_truth_masks=gt_masks,
    )
    log.info(
        "Loaded %d points, %d poses, %d frames, %d seeds",
        len(inputs.cloud),
        len(inputs.trajectory),
        len(frames),
        len(inputs.seeds),
    )
    return inputs


def _lidar_poses(inputs: PipelineInputs) -> dict[str, RigidPose]:
    return {
        f.frame_id: interpolate_camera_pose(inputs.trajectory, f.timestamp)
        for f in inputs.frames
    }


def camera_poses(
    inputs: PipelineInputs, extrinsic: RigidPose
) -> dict[str, RigidPose]:
    """Camera-to-world pose of every frame at its timestamp."""
    return {
        frame_id: camera_pose_from_lidar(pose, extrinsic)
        for frame_id, pose in _lidar_poses(inputs).items()
    }


def calibrate(inputs: PipelineInputs, cfg: CalibrationConfig) -> CalibrationResult:
    lidar = _lidar_poses(inputs)
    frames = [
        CalibrationFrame(
            image=f.image, lidar_pose=lidar[f.frame_id], frame_id=f.frame_id
        )
        for f in inputs.frames
    ]
    return refine_extrinsic(inputs.cloud, frames, inputs.camera, inputs.extrinsic, cfg)


async def refine_masks(
    inputs: PipelineInputs, cfg: MaskStageConfig
) -> dict[str, BinaryMask]:
    """Refined mask of every frame that has one; a frame whose mask yields
    no prompts keeps its mask."""
    refiner = get_refiner(cfg.refiner)
    refined = {}
    for frame in inputs.frames:
        if frame.mask is None:
            continue
        try:
            refined[frame.frame_id] = await refine_mask(
                frame.image, frame.mask, refiner, cfg.params
            )
        except (EmptySkeleton, NoClusters) as e:
            log.warning("Frame %s keeps its mask: %s", frame.frame_id, e)
            refined[frame.frame_id] = frame.mask
    return refined


def denoise(
    cloud: PointCloud, cfg: DenoiseConfig
) -> tuple[PointCloud, DenoiseSummary]:
    """Crop, remove statistical outliers and smooth."""
    n_in = len(cloud)
    if cfg.crop is not None:
        cloud = crop_box(cloud, cfg.crop.min_corner, cfg.crop.max_corner)
    n_cropped = len(cloud)
    kept, removed = sor_filter(cloud, cfg.sor.k, cfg.sor.n_sigma, cfg.sor.mode)
    summary = DenoiseSummary(
        input_points=n_in,
        cropped_points=n_cropped,
        removed_points=len(removed),
        smoothed=cfg.smooth,
    )
    if not cfg.smooth:
        return kept, summary
    result = mls_smooth(kept, cfg.mls)
    return result.cloud, summary.model_copy(
        update={"fallback_points": result.fallback_count, "mls_radius": result.radius}
    )


def fusion_frames(
    inputs: PipelineInputs,
    poses: dict[str, RigidPose],
    masks: Optional[dict[str, BinaryMask]] = None,
) -> list[FusionFrame]:
    masks = masks or {}
    return [
        FusionFrame(
            frame_id=f.frame_id,
            image=f.image,
            camera_pose=poses[f.frame_id],
            mask=masks.get(f.frame_id, f.mask),
        )
        for f in inputs.frames
    ]


def fuse(
    cloud: PointCloud,
    frames: list[FusionFrame],
    inputs: PipelineInputs,
    cfg: FusionConfig,
) -> PointCloud:
    return fuse_cloud(cloud, frames, inputs.camera, cfg)


def metrology_frames(
    inputs: PipelineInputs,
    poses: dict[str, RigidPose],
    masks: Optional[dict[str, BinaryMask]] = None,
) -> dict[str, MetrologyFrame]:
    masks = masks or {}
    frames = {}
    for f in inputs.frames:
        mask = masks.get(f.frame_id, f.mask)
        if mask is not None:
            frames[f.frame_id] = MetrologyFrame(
                frame_id=f.frame_id, mask=mask, camera_pose=poses[f.frame_id]
            )
    return frames


def measure(
    cloud: PointCloud,
    frames: dict[str, MetrologyFrame],
    inputs: PipelineInputs,
    params: MetrologyParams,
) -> SiteResults:
    return measure_sites(cloud, inputs.seeds, frames, inputs.camera, params)


def evaluate(
    cloud: PointCloud,
    inputs: PipelineInputs,
    cfg: EvaluationConfig,
    masks: Optional[dict[str, BinaryMask]] = None,
    sites: Optional[SiteResults] = None,
) -> EvaluationReport:
    """Density, roughness, mask agreement, dimension and width errors, each
    when its inputs are available."""
    report = EvaluationReport(
        density=point_surface_density(cloud, cfg.density_radius),
        density_radius=cfg.density_radius,
        roughness=surface_roughness(cloud, cfg.roughness_radius),
        roughness_radius=cfg.roughness_radius,
        notes=["density counts exclude the point itself"],
    )

    masks = masks or {f.frame_id: f.mask for f in inputs.frames if f.mask is not None}
    shared = [fid for fid in masks if fid in inputs.ground_truth_masks]
    if shared:
        total = sum(
            confusion_counts(masks[fid], inputs.ground_truth_masks[fid]).matrix
            for fid in shared
        )
        ious = ConfusionCounts(matrix=total).iou()
        report.class_iou = [float(x) for x in ious]
        report.miou = float(np.mean(ious))

    if cfg.geometry_checks:
        errors = [dimension_error(c.p, c.q, c.reference) for c in cfg.geometry_checks]
        report.geometry_error = float(np.mean(errors))

    if sites is not None and inputs.reference_widths:
        pairs = [
            (m.width_mm, inputs.reference_widths[m.crack_id])
            for m in sites.measurements
            if m.crack_id in inputs.reference_widths
        ]
        if pairs:
            try:
                report.width_errors = compute_error_stats(pairs)
            except CrackscanError as e:
                report.notes.append(f"width errors unavailable: {e}")
    return report

