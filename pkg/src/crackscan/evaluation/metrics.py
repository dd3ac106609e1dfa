import logging

import numpy as np
from numpy.typing import ArrayLike

from ..denoise.neighbors import NeighborIndex
from ..exceptions import NonPositiveReference
from ..formats.schemas import BinaryMask, PointCloud
from .schemas import ConfusionCounts, StatSummary

log = logging.getLogger(__name__)

N_CLASSES = 2


def confusion_counts(pred: BinaryMask, gt: BinaryMask) -> ConfusionCounts:
    """Background/crack confusion matrix, rows indexed by the ground truth."""
    pred.check_dimensions(gt.width, gt.height)
    truth = gt.bits.ravel().astype(np.int64)
    guess = pred.bits.ravel().astype(np.int64)
    counts = np.bincount(N_CLASSES * truth + guess, minlength=N_CLASSES**2)
    return ConfusionCounts(matrix=counts.reshape(N_CLASSES, N_CLASSES))


def miou(pred: BinaryMask, gt: BinaryMask) -> float:
    """Mean intersection over union of the background and crack classes."""
    return float(confusion_counts(pred, gt).iou().mean())


def point_surface_density(cloud: PointCloud, radius: float = 0.01) -> StatSummary:
    """Mean and standard deviation of the number of other points within
    ``radius`` of each point."""
    if len(cloud) == 0:
        return StatSummary(mean=0.0, std=0.0, count=0)
    index = NeighborIndex(cloud.points)
    counts = index.radius_counts(cloud.points, radius) - 1
    return StatSummary(
        mean=float(counts.mean()), std=float(counts.std()), count=len(counts)
    )


def surface_roughness(cloud: PointCloud, radius: float = 0.01) -> StatSummary:
    """Distance of each point to the least-squares plane of its radius
    neighborhood.

    Points with fewer than three neighbors are skipped and counted in
    ``skipped``.
    """
    if len(cloud) == 0:
        return StatSummary(mean=0.0, std=0.0, count=0)
    index = NeighborIndex(cloud.points)
    distances = []
    skipped = 0
    for i, hood in enumerate(index.radius_many(cloud.points, radius)):
        if len(hood) - 1 < 3:
            skipped += 1
            continue
        pts = cloud.points[hood]
        centroid = pts.mean(axis=0)
        _, vecs = np.linalg.eigh((pts - centroid).T @ (pts - centroid))
        distances.append(abs(float((cloud.points[i] - centroid) @ vecs[:, 0])))
    if skipped:
        log.info("Roughness skipped %d points with fewer than 3 neighbors", skipped)
    if not distances:
        return StatSummary(mean=0.0, std=0.0, count=0, skipped=skipped)
    d = np.asarray(distances)
    return StatSummary(
        mean=float(d.mean()), std=float(d.std()), count=len(d), skipped=skipped
    )


def dimension_error(p: ArrayLike, q: ArrayLike, reference: float) -> float:
    """Relative error of the measured distance ``|p - q|`` against
    ``reference``."""
    if reference <= 0:
        raise NonPositiveReference()
    measured = float(np.linalg.norm(np.subtract(p, q, dtype=np.float64)))
    return abs(measured - reference) / reference
