"""Hidden-point removal by spherical inversion and convex hull."""

import logging

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.spatial import ConvexHull, QhullError

from ..exceptions import DegeneratePoint, TooFewPoints
from ..formats.schemas import PointCloud

log = logging.getLogger(__name__)

MIN_DISTANCE = 1e-9


def spherical_flip(points: NDArray[np.float64], radius: float) -> NDArray[np.float64]:
    """Invert camera-relative points through a sphere of ``radius``."""
    norms = np.linalg.norm(points, axis=1)
    return points + 2.0 * ((radius - norms) / norms)[:, None] * points


def hpr_visible(
    cloud: PointCloud | ArrayLike,
    camera_position: ArrayLike,
    radius_scale: float = 1000.0,
) -> NDArray[np.int64]:
    """Indices of the points visible from ``camera_position``, ascending.

    A point is visible when its inverted image is a vertex of the convex
    hull of all inverted points together with the camera center.

    Raises:
        DegeneratePoint: A point coincides with the camera center.
        TooFewPoints: Fewer than four points.
    """
    pts = cloud.points if isinstance(cloud, PointCloud) else cloud
    pts = np.asarray(pts, dtype=np.float64).reshape(-1, 3)
    n = len(pts)
    if n < 4:
        raise TooFewPoints(required=4, actual=n)
    rel = pts - np.asarray(camera_position, dtype=np.float64).reshape(3)
    norms = np.linalg.norm(rel, axis=1)
    if np.any(norms <= MIN_DISTANCE):
        raise DegeneratePoint()

    flipped = spherical_flip(rel, radius_scale * float(norms.max()))
    try:
        hull = ConvexHull(np.vstack([flipped, np.zeros((1, 3))]))
    except QhullError as e:
        log.warning("Visibility hull is degenerate, keeping all %d points: %s", n, e)
        return np.arange(n, dtype=np.int64)
    vertices = hull.vertices[hull.vertices < n]
    return np.sort(vertices).astype(np.int64)
