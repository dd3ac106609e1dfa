"""Crack width measurement from a seed pixel."""

import logging
from contextlib import contextmanager
from typing import Iterator, Mapping, Optional, Sequence

import numpy as np

from ..denoise.neighbors import NeighborIndex
from ..exceptions import CrackscanError, EmptyInput, NonPositiveReference
from ..formats.schemas import BinaryMask, PointCloud, SeedEntry
from ..geometry.operations import back_project_ray
from ..geometry.schemas import CameraModel, RigidPose
from ..masks.skeleton import extract_skeleton
from .direction import skeleton_direction, snap_to_skeleton
from .edges import trace_edges
from .plane import find_3d_edge, fit_local_plane, refine_3d_edge, sample_plane_points
from .schemas import (
    CrackMeasurement,
    ErrorStats,
    LocalPlane,
    MetrologyFrame,
    MetrologyParams,
    SiteFailure,
    SiteResults,
    edge_distance,
)

log = logging.getLogger(__name__)


@contextmanager
def _stage(name: str) -> Iterator[None]:
    try:
        yield
    except CrackscanError as e:
        raise e.with_stage(name)


def _ray_plane_point(
    plane: LocalPlane, origin: np.ndarray, direction: np.ndarray
) -> np.ndarray:
    n = plane.normal
    denom = float(n @ direction)
    if abs(denom) < 1e-12:
        return origin - (float(n @ origin) + plane.d) * n
    t = -(float(n @ origin) + plane.d) / denom
    return origin + t * direction


def measure_crack(
    cloud: PointCloud,
    mask: BinaryMask,
    skeleton: BinaryMask,
    seed: tuple[float, float],
    cam: CameraModel,
    camera_pose: RigidPose,
    params: Optional[MetrologyParams] = None,
    *,
    crack_id: str = "",
    frame_id: str = "",
    index: Optional[NeighborIndex] = None,
) -> CrackMeasurement:
    """Measure the crack width at ``seed``.

    The seed is snapped to the skeleton, the crack direction and its two
    sub-pixel edges are found in the image, and each edge pixel is lifted
    to the local plane of the cloud by minimum reprojection error. The
    width is the distance between the two 3D edge points.

    Errors raised by a step carry the step name in ``stage``.
    """
    params = params or MetrologyParams()
    mask.check_dimensions(cam.width, cam.height)

    with _stage("direction"):
        snapped = snap_to_skeleton(skeleton, seed, params.snap_radius)
        direction = skeleton_direction(
            skeleton, snapped, params.window, params.sigma, params.snap_radius
        )
    with _stage("edges"):
        left_2d, right_2d = trace_edges(mask, snapped, direction, params.trace_step)
    with _stage("plane"):
        origin, ray = back_project_ray(cam, camera_pose, *snapped)
        plane = fit_local_plane(
            cloud,
            origin,
            ray,
            params.plane_neighbors,
            hit_radius=params.ray_hit_radius,
            max_distance=params.ray_max_distance,
            index=index,
        )
    with _stage("sampling"):
        center = _ray_plane_point(plane, origin, ray)
        samples = sample_plane_points(
            plane, center, params.sample_radius, params.sample_step
        )
    with _stage("edge-3d"):
        matches = []
        for target in (left_2d, right_2d):
            match = find_3d_edge(samples, target, cam, camera_pose)
            match = refine_3d_edge(
                plane,
                match,
                target,
                cam,
                camera_pose,
                params.sample_step,
                params.refine_levels,
            )
            matches.append(match)
    left, right = matches

    location = (np.asarray(left.point) + np.asarray(right.point)) / 2.0
    result = CrackMeasurement(
        crack_id=crack_id,
        frame_id=frame_id,
        seed=(float(seed[0]), float(seed[1])),
        direction=(float(direction[0]), float(direction[1])),
        edge_left_2d=left_2d,
        edge_right_2d=right_2d,
        edge_left_3d=left.point,
        edge_right_3d=right.point,
        width=edge_distance(left.point, right.point),
        plane=plane.as_tuple(),
        plane_rms=plane.rms,
        location_3d=tuple(float(x) for x in location),
        pixel_error_left=left.pixel_error,
        pixel_error_right=right.pixel_error,
    )
    log.debug(
        "Crack %s in frame %s: width %.4f mm (pixel errors %.3f, %.3f)",
        crack_id,
        frame_id,
        result.width_mm,
        left.pixel_error,
        right.pixel_error,
    )
    return result


def measure_sites(
    cloud: PointCloud,
    seeds: Sequence[SeedEntry],
    frames: Mapping[str, MetrologyFrame],
    cam: CameraModel,
    params: Optional[MetrologyParams] = None,
) -> SiteResults:
    """Measure every seed; a failing seed is recorded and skipped.

    Skeletons are computed once per frame when the frame does not carry
    one.
    """
    params = params or MetrologyParams()
    index = NeighborIndex(cloud.points)
    skeletons: dict[str, BinaryMask] = {}
    results = SiteResults()

    for seed in seeds:
        frame = frames.get(seed.frame_id)
        if frame is None:
            results.failures.append(
                SiteFailure(
                    crack_id=seed.crack_id,
                    frame_id=seed.frame_id,
                    message=f"Unknown frame '{seed.frame_id}'.",
                )
            )
            continue
        if seed.frame_id not in skeletons:
            skeletons[seed.frame_id] = frame.skeleton or extract_skeleton(frame.mask)
        try:
            measurement = measure_crack(
                cloud,
                frame.mask,
                skeletons[seed.frame_id],
                (seed.u, seed.v),
                cam,
                frame.camera_pose,
                params,
                crack_id=seed.crack_id,
                frame_id=seed.frame_id,
                index=index,
            )
        except CrackscanError as e:
            log.warning("Crack %s could not be measured: %s", seed.crack_id, e)
            results.failures.append(
                SiteFailure(
                    crack_id=seed.crack_id,
                    frame_id=seed.frame_id,
                    stage=e.stage,
                    message=e.message,
                )
            )
            continue
        results.measurements.append(measurement)

    log.info(
        "Measured %d of %d crack sites",
        len(results.measurements),
        len(seeds),
    )
    return results


def compute_error_stats(pairs: Sequence[tuple[float, float]]) -> ErrorStats:
    """Mean absolute error (mm) and mean relative error (%) of
    ``(calculated, reference)`` width pairs."""
    if not pairs:
        raise EmptyInput()
    arr = np.asarray(pairs, dtype=np.float64).reshape(-1, 2)
    calc, ref = arr[:, 0], arr[:, 1]
    if np.any(ref <= 0):
        raise NonPositiveReference()
    abs_err = np.abs(calc - ref)
    return ErrorStats(
        mae_mm=float(abs_err.mean()),
        mre_percent=float((abs_err / ref).mean() * 100.0),
        count=len(arr),
    )
