"""Moving-least-squares projection smoothing.

Each point is projected onto a degree-m polynomial height field fitted to
its radius neighborhood over a weighted-PCA reference plane, with Gaussian
weights ``exp(-(d / radius)^2)``.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Optional

import numpy as np
from numpy.typing import ArrayLike

from ..exceptions import (
    DegenerateNeighborhood,
    InsufficientNeighbors,
    ValidationError,
)
from ..formats.schemas import PointCloud
from .neighbors import NeighborIndex
from .schemas import MlsConfig, MlsResult, MlsSurface

log = logging.getLogger(__name__)

DEFAULT_RADIUS_FACTOR = 5.0


def polynomial_terms(degree: int) -> list[tuple[int, int]]:
    """Exponents ``(i, j)`` of ``x^i y^j`` ordered by total degree, then by
    descending power of x."""
    return [(d - j, j) for d in range(degree + 1) for j in range(d + 1)]


def required_neighbors(degree: int) -> int:
    return (degree + 1) * (degree + 2) // 2


def _orient(normal: np.ndarray, view: Optional[np.ndarray]) -> np.ndarray:
    ref = view if view is not None else np.array([0.0, 0.0, 1.0])
    return -normal if float(normal @ ref) < 0.0 else normal


def _tangent_axes(e1: np.ndarray, normal: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    if e1[np.argmax(np.abs(e1))] < 0:
        e1 = -e1
    e2 = np.cross(normal, e1)
    return e1, e2 / np.linalg.norm(e2)


def fit_mls_polynomial(
    center: ArrayLike, neighbors: ArrayLike | PointCloud, cfg: MlsConfig
) -> MlsSurface:
    """Fit the weighted local surface around ``center``.

    Raises:
        InsufficientNeighbors: Fewer neighbors within the radius than
            polynomial coefficients.
        DegenerateNeighborhood: The weighted system is rank deficient.
    """
    if cfg.search_radius is None:
        raise ValidationError("fit_mls_polynomial needs an explicit search_radius.")
    c = np.asarray(center, dtype=np.float64).reshape(3)
    pts = neighbors.points if isinstance(neighbors, PointCloud) else neighbors
    pts = np.asarray(pts, dtype=np.float64).reshape(-1, 3)
    h = cfg.search_radius
    dist = np.linalg.norm(pts - c, axis=1)
    pts, dist = pts[dist <= h], dist[dist <= h]

    terms = polynomial_terms(cfg.polynomial_degree)
    if len(pts) < len(terms):
        raise InsufficientNeighbors(
            f"{len(pts)} neighbors within {h:g} m; degree "
            f"{cfg.polynomial_degree} needs {len(terms)}."
        )

    w = np.exp(-((dist / h) ** 2))
    origin = (w[:, None] * pts).sum(axis=0) / w.sum()
    rel = pts - origin
    cov = (w[:, None] * rel).T @ rel
    eigval, eigvec = np.linalg.eigh(cov)
    if eigval[1] <= 1e-12 * max(eigval[2], 1e-300):
        raise DegenerateNeighborhood()
    view = np.asarray(cfg.view_direction) if cfg.view_direction is not None else None
    normal = _orient(eigvec[:, 0], view)
    e1, e2 = _tangent_axes(eigvec[:, 2], normal)

    x, y, f = rel @ e1, rel @ e2, rel @ normal
    design = np.column_stack([x**i * y**j for i, j in terms])
    sw = np.sqrt(w)
    coeffs, _, rank, _ = np.linalg.lstsq(design * sw[:, None], f * sw, rcond=None)
    if rank < len(terms):
        raise DegenerateNeighborhood(
            f"Weighted design matrix has rank {rank} of {len(terms)}."
        )
    return MlsSurface(
        origin=origin,
        frame=np.vstack([e1, e2, normal]),
        degree=cfg.polynomial_degree,
        terms=terms,
        coefficients=coeffs,
        support=len(pts),
    )


def _smooth_chunk(
    points: np.ndarray,
    index: NeighborIndex,
    indices: np.ndarray,
    cfg: MlsConfig,
) -> tuple[np.ndarray, int]:
    out = points[indices].copy()
    failures = 0
    neighborhoods = index.radius_many(points[indices], cfg.search_radius)
    for row, (i, hood) in enumerate(zip(indices, neighborhoods)):
        try:
            surface = fit_mls_polynomial(points[i], points[hood], cfg)
        except (InsufficientNeighbors, DegenerateNeighborhood):
            failures += 1
            continue
        out[row] = surface.project(points[i])
    return out, failures


def mls_smooth(cloud: PointCloud, cfg: Optional[MlsConfig] = None) -> MlsResult:
    """Project every point onto its local MLS surface.

    Points whose neighborhood cannot be fitted are passed through unchanged
    and counted in ``fallback_count``.
    """
    cfg = cfg or MlsConfig()
    n = len(cloud)
    index = NeighborIndex(cloud.points)
    radius = cfg.search_radius
    if radius is None:
        radius = DEFAULT_RADIUS_FACTOR * index.median_spacing()
    if n == 0 or radius <= 0:
        log.info("MLS skipped: %d points, radius %g", n, radius)
        return MlsResult(cloud=cloud, fallback_count=n, radius=max(radius, 0.0))
    cfg = cfg.model_copy(update={"search_radius": radius})

    chunks = np.array_split(np.arange(n), max(1, min(cfg.workers * 4, n)))
    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            parts = list(
                pool.map(lambda ix: _smooth_chunk(cloud.points, index, ix, cfg), chunks)
            )
    else:
        parts = [_smooth_chunk(cloud.points, index, ix, cfg) for ix in chunks]

    smoothed = np.vstack([p for p, _ in parts])
    failures = sum(f for _, f in parts)
    log.info(
        "MLS smoothed %d points with radius %.6g m; %d passed through",
        n,
        radius,
        failures,
    )
    return MlsResult(
        cloud=cloud.with_points(smoothed), fallback_count=failures, radius=radius
    )
