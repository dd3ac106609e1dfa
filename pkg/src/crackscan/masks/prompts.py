import logging

import numpy as np
from numpy.typing import ArrayLike
from sklearn.cluster import DBSCAN

from ..exceptions import EmptySkeleton, NoClusters, ValidationError
from ..formats.schemas import BinaryMask
from .schemas import Rect

log = logging.getLogger(__name__)

NOISE = -1


def sample_prompts(
    skeleton: BinaryMask, edt: np.ndarray, k: int, min_dist: float
) -> np.ndarray:
    """Pick up to ``k`` skeleton pixels, highest distance value first, keeping
    each at least ``min_dist`` from those already kept.

    Ties in the distance value are broken by row, then column.

    Returns:
        ``(N, 2)`` integer array of ``(u, v)`` pixel coordinates.
    """
    if k < 1:
        raise ValidationError("k must be at least 1.")
    rows, cols = np.nonzero(skeleton.bits)
    if len(rows) == 0:
        raise EmptySkeleton()
    values = np.asarray(edt)[rows, cols]
    order = np.lexsort((cols, rows, -values))

    kept: list[tuple[int, int]] = []
    min_dist_sq = float(min_dist) ** 2
    for i in order:
        u, v = int(cols[i]), int(rows[i])
        if all((u - ku) ** 2 + (v - kv) ** 2 >= min_dist_sq for ku, kv in kept):
            kept.append((u, v))
            if len(kept) == k:
                break
    log.debug("Sampled %d prompt points from %d skeleton pixels", len(kept), len(rows))
    return np.array(kept, dtype=np.int64).reshape(-1, 2)


def cluster_prompts(points: ArrayLike, eps: float, min_pts: int) -> np.ndarray:
    """Density-based clustering of prompt points.

    ``min_pts`` counts the point itself. Noise is labeled -1; clusters are
    numbered from 0 in order of their first member.
    """
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    if len(pts) == 0:
        return np.zeros(0, dtype=np.int64)
    raw = DBSCAN(eps=eps, min_samples=min_pts).fit(pts).labels_
    labels = np.full(len(pts), NOISE, dtype=np.int64)
    mapping: dict[int, int] = {}
    for i, label in enumerate(raw):
        if label == NOISE:
            continue
        if label not in mapping:
            mapping[label] = len(mapping)
        labels[i] = mapping[label]
    return labels


def make_crop_batches(
    points: ArrayLike,
    cluster_ids: ArrayLike,
    dilation: int,
    width: int,
    height: int,
) -> list[Rect]:
    """Bounding box of each cluster grown by ``dilation`` and clamped to the
    image, indexed by cluster id."""
    pts = np.asarray(points, dtype=np.int64).reshape(-1, 2)
    ids = np.asarray(cluster_ids, dtype=np.int64)
    clusters = sorted(set(int(c) for c in ids) - {NOISE})
    if not clusters:
        raise NoClusters()
    rects = []
    for cid in clusters:
        member = pts[ids == cid]
        u0 = max(int(member[:, 0].min()) - dilation, 0)
        v0 = max(int(member[:, 1].min()) - dilation, 0)
        u1 = min(int(member[:, 0].max()) + dilation, width - 1)
        v1 = min(int(member[:, 1].max()) + dilation, height - 1)
        rects.append((u0, v0, u1 - u0 + 1, v1 - v0 + 1))
    return rects
