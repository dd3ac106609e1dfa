"""Local plane around a viewing ray, plane sampling and the
minimum-reprojection-error edge search."""

import logging
from typing import Optional

import numpy as np
from numpy.typing import ArrayLike

from ..denoise.neighbors import NeighborIndex
from ..exceptions import (
    DegenerateNeighborhood,
    NoProjectableSamples,
    RayMiss,
    TooFewPoints,
    VerticalPlane,
)
from ..formats.schemas import PointCloud
from ..geometry.operations import project_points, transform_points
from ..geometry.schemas import CameraModel, RigidPose
from .schemas import EdgeMatch, LocalPlane

log = logging.getLogger(__name__)

# height axis preference when normal components tie: z, then x, then y
_AXIS_PREFERENCE = (2, 0, 1)
VERTICAL_TOLERANCE = 1e-6


def ray_hit(
    points: np.ndarray,
    origin: ArrayLike,
    direction: ArrayLike,
    hit_radius: float = 0.01,
    max_distance: float = 0.1,
) -> int:
    """Index of the cloud point where the ray meets the cloud.

    Among points within ``hit_radius`` of the ray (in front of its origin)
    the one with the smallest ray parameter wins; otherwise the point
    closest to the ray, if it lies within ``max_distance``.
    """
    o = np.asarray(origin, dtype=np.float64).reshape(3)
    d = np.asarray(direction, dtype=np.float64).reshape(3)
    d = d / np.linalg.norm(d)
    rel = points - o
    t = rel @ d
    perp = np.linalg.norm(rel - t[:, None] * d, axis=1)
    ahead = t > 0
    if not np.any(ahead):
        raise RayMiss()

    close = np.flatnonzero(ahead & (perp <= hit_radius))
    if len(close):
        return int(close[np.argmin(t[close])])
    candidates = np.flatnonzero(ahead)
    nearest = candidates[np.argmin(perp[candidates])]
    if perp[nearest] > max_distance:
        raise RayMiss(
            f"Closest point is {perp[nearest]:.4g} m from the ray "
            f"(limit {max_distance:g} m)."
        )
    return int(nearest)


def fit_local_plane(
    cloud: PointCloud,
    origin: ArrayLike,
    direction: ArrayLike,
    k: int = 60,
    *,
    hit_radius: float = 0.01,
    max_distance: float = 0.1,
    index: Optional[NeighborIndex] = None,
) -> LocalPlane:
    """Least-squares plane through the ``k`` cloud points nearest to where
    the viewing ray meets the cloud.

    The normal is oriented with ``c > 0``; when ``c`` vanishes it faces
    the ray origin.
    """
    if len(cloud) == 0:
        raise TooFewPoints(required=3, actual=0)
    hit = ray_hit(cloud.points, origin, direction, hit_radius, max_distance)
    index = index or NeighborIndex(cloud.points)
    _, nn = index.knn(cloud.points[hit], k)
    pts = cloud.points[nn[0]]
    if len(pts) < 3:
        raise DegenerateNeighborhood(f"Only {len(pts)} points around the ray hit.")

    centroid = pts.mean(axis=0)
    rel = pts - centroid
    eigval, eigvec = np.linalg.eigh(rel.T @ rel)
    if eigval[1] <= 1e-12 * max(eigval[2], 1e-300):
        raise DegenerateNeighborhood()
    normal = eigvec[:, 0]
    if abs(normal[2]) > 1e-12:
        if normal[2] < 0:
            normal = -normal
    elif normal @ (np.asarray(origin, dtype=np.float64) - centroid) < 0:
        normal = -normal

    offsets = rel @ normal
    return LocalPlane(
        a=normal[0],
        b=normal[1],
        c=normal[2],
        d=-float(normal @ centroid),
        rms=float(np.sqrt(np.mean(offsets**2))),
        support=len(pts),
    )


def _height_axis(normal: np.ndarray) -> int:
    mags = np.abs(normal)
    top = mags.max()
    for axis in _AXIS_PREFERENCE:
        if mags[axis] >= top - 1e-12:
            return axis
    return 2


def grid_count(radius: float, step: float) -> int:
    return int(np.floor(2.0 * radius / step + 1e-9)) + 1


def sample_plane_points(
    plane: LocalPlane, center: ArrayLike, radius: float, step: float
) -> PointCloud:
    """Square grid of points on ``plane`` around ``center``.

    The grid spans ``center +- radius`` on the two axes other than the one
    the normal points along most; the remaining coordinate is solved from
    the plane equation, so tilted and vertical planes are sampled alike.

    Raises:
        VerticalPlane: The plane is parallel to every sampling axis.
    """
    n = plane.normal
    k = _height_axis(n)
    if abs(n[k]) <= VERTICAL_TOLERANCE:
        raise VerticalPlane()
    i, j = [a for a in (0, 1, 2) if a != k]
    c = np.asarray(center, dtype=np.float64).reshape(3)

    offsets = -radius + step * np.arange(grid_count(radius, step))
    gi, gj = np.meshgrid(c[i] + offsets, c[j] + offsets, indexing="ij")
    pts = np.empty((gi.size, 3))
    pts[:, i] = gi.ravel()
    pts[:, j] = gj.ravel()
    pts[:, k] = (-n[i] * pts[:, i] - n[j] * pts[:, j] - plane.d) / n[k]
    return PointCloud(points=pts)


def find_3d_edge(
    samples: PointCloud | ArrayLike,
    target: tuple[float, float],
    cam: CameraModel,
    camera_pose: RigidPose,
) -> EdgeMatch:
    """Sample whose projection lands closest to ``target``.

    The first sample wins among equal errors.
    """
    pts = samples.points if isinstance(samples, PointCloud) else samples
    pts = np.asarray(pts, dtype=np.float64).reshape(-1, 3)
    uv, in_front = project_points(cam, transform_points(camera_pose.inverse(), pts))
    if not np.any(in_front):
        raise NoProjectableSamples()
    err = np.full(len(pts), np.inf)
    err[in_front] = np.hypot(uv[in_front, 0] - target[0], uv[in_front, 1] - target[1])
    best = int(np.argmin(err))
    return EdgeMatch(point=tuple(float(x) for x in pts[best]), pixel_error=err[best])


def refine_3d_edge(
    plane: LocalPlane,
    match: EdgeMatch,
    target: tuple[float, float],
    cam: CameraModel,
    camera_pose: RigidPose,
    step: float,
    levels: int = 1,
) -> EdgeMatch:
    """Repeat the edge search on finer grids around the current winner.

    Each level samples a tenth of the previous step within one previous
    step; a finer winner replaces the current one only if its pixel error
    is not larger.
    """
    for _ in range(levels):
        fine = find_3d_edge(
            sample_plane_points(plane, match.point, step, step / 10.0),
            target,
            cam,
            camera_pose,
        )
        if fine.pixel_error <= match.pixel_error:
            match = fine
        step /= 10.0
    return match
