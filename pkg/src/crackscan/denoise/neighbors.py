import numpy as np
from numpy.typing import ArrayLike
from scipy.spatial import cKDTree


class NeighborIndex:
    """Immutable k-d tree over a point array for k-NN and radius queries."""

    def __init__(self, points: ArrayLike):
        self.points = np.asarray(points, dtype=np.float64).reshape(-1, 3)
        self._tree = cKDTree(self.points)

    def __len__(self) -> int:
        return len(self.points)

    def knn(self, queries: ArrayLike, k: int) -> tuple[np.ndarray, np.ndarray]:
        """Distances and indices of the ``k`` nearest points, nearest first.

        Always returns 2-D arrays of shape ``(len(queries), k)``.
        """
        q = np.asarray(queries, dtype=np.float64).reshape(-1, 3)
        k = min(k, len(self.points))
        dist, idx = self._tree.query(q, k=k)
        return dist.reshape(len(q), k), idx.reshape(len(q), k)

    def radius(self, query: ArrayLike, r: float) -> np.ndarray:
        """Sorted indices of points within distance ``r`` (inclusive)."""
        q = np.asarray(query, dtype=np.float64).reshape(3)
        return np.array(sorted(self._tree.query_ball_point(q, r)), dtype=np.int64)

    def radius_many(self, queries: ArrayLike, r: float) -> list[np.ndarray]:
        q = np.asarray(queries, dtype=np.float64).reshape(-1, 3)
        return [
            np.array(sorted(ix), dtype=np.int64)
            for ix in self._tree.query_ball_point(q, r)
        ]

    def radius_counts(self, queries: ArrayLike, r: float) -> np.ndarray:
        q = np.asarray(queries, dtype=np.float64).reshape(-1, 3)
        return np.asarray(self._tree.query_ball_point(q, r, return_length=True))

    def median_spacing(self) -> float:
        """Median distance from each point to its nearest other point."""
        if len(self.points) < 2:
            return 0.0
        dist, _ = self.knn(self.points, 2)
        return float(np.median(dist[:, 1]))
