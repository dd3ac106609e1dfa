import logging

import numpy as np
from scipy.stats import norm

from ..exceptions import TooFewPoints
from ..formats.schemas import PointCloud
from .neighbors import NeighborIndex
from .schemas import SorMode, SorResult

log = logging.getLogger(__name__)


def mean_neighbor_distances(index: NeighborIndex, k: int) -> np.ndarray:
    """Mean distance of every indexed point to its ``k`` nearest other points."""
    dist, _ = index.knn(index.points, k + 1)
    return dist[:, 1:].mean(axis=1)


def _outliers(r: np.ndarray, n_sigma: float, mode: SorMode) -> np.ndarray:
    mu = float(r.mean())
    sigma = float(r.std())
    tol = 1e-12 * max(abs(mu), 1e-300)
    if mode == "symmetric":
        return np.abs(r - mu) > n_sigma * sigma + tol
    if mode == "gaussian":
        lo, hi = np.quantile(r, [norm.cdf(-n_sigma), norm.cdf(n_sigma)])
        return (r < lo - tol) | (r > hi + tol)
    return r > mu + n_sigma * sigma + tol


def sor_filter(
    cloud: PointCloud,
    k: int = 60,
    n_sigma: float = 1.0,
    mode: SorMode = "upper",
) -> SorResult:
    """Statistical outlier removal over the mean k-neighbor distance ``r``.

    Modes:
        upper: remove points with ``r > mean + n_sigma * std``.
        symmetric: remove points with ``|r - mean| > n_sigma * std``.
        gaussian: keep the central share of ``r`` that an ``n_sigma`` band
            holds under a normal law (68.27% for ``n_sigma=1``) and remove
            both tails. Gross outliers sit in the upper tail as long as they
            are fewer than the tail share.
    """
    n = len(cloud)
    if n <= k:
        raise TooFewPoints(required=k + 1, actual=n)

    r = mean_neighbor_distances(NeighborIndex(cloud.points), k)
    outlier = _outliers(r, n_sigma, mode)

    removed = np.flatnonzero(outlier)
    log.info(
        "SOR removed %d of %d points (mean %.6g, std %.6g, mode %s)",
        len(removed),
        n,
        float(r.mean()),
        float(r.std()),
        mode,
    )
    return SorResult(kept=cloud.subset(~outlier), removed_indices=removed)
