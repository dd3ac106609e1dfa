import numpy as np

from .schemas import CrackSpec


class CrackBand:
    """Polyline crack band in surface coordinates."""

    def __init__(self, spec: CrackSpec):
        self.spec = spec
        self.vertices = np.asarray(spec.centerline, dtype=np.float64)
        seg = np.diff(self.vertices, axis=0)
        self.seg_lengths = np.linalg.norm(seg, axis=1)
        self.cumulative = np.concatenate([[0.0], np.cumsum(self.seg_lengths)])
        self.length = float(self.cumulative[-1])

    def width_at_arc(self, arc: np.ndarray) -> np.ndarray:
        end = self.spec.end_width
        if end is None:
            end = self.spec.width
        frac = np.asarray(arc, dtype=np.float64) / self.length if self.length else 0.0
        return self.spec.width + (end - self.spec.width) * frac

    def nearest(self, coords: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Distance to the centerline and band width at the nearest
        centerline point, for each ``(s, w)`` row."""
        q = np.asarray(coords, dtype=np.float64).reshape(-1, 2)
        best_d = np.full(len(q), np.inf)
        best_arc = np.zeros(len(q))
        for i, length in enumerate(self.seg_lengths):
            a = self.vertices[i]
            ab = self.vertices[i + 1] - a
            if length == 0:
                t = np.zeros(len(q))
            else:
                t = np.clip(((q - a) @ ab) / length**2, 0.0, 1.0)
            d = np.linalg.norm(q - (a + t[:, None] * ab), axis=1)
            closer = d < best_d
            best_d[closer] = d[closer]
            best_arc[closer] = self.cumulative[i] + t[closer] * length
        return best_d, self.width_at_arc(best_arc)

    def contains(self, coords: np.ndarray) -> np.ndarray:
        q = np.asarray(coords, dtype=np.float64).reshape(-1, 2)
        finite = np.all(np.isfinite(q), axis=1)
        inside = np.zeros(len(q), dtype=bool)
        if np.any(finite):
            d, w = self.nearest(q[finite])
            inside[finite] = d <= w / 2.0
        return inside

    def point_at(self, fraction: float) -> tuple[np.ndarray, np.ndarray, float]:
        """Centerline point, unit tangent and width at ``fraction`` of the
        length."""
        arc = fraction * self.length
        i = int(np.searchsorted(self.cumulative, arc, side="right")) - 1
        i = min(max(i, 0), len(self.seg_lengths) - 1)
        a = self.vertices[i]
        ab = self.vertices[i + 1] - a
        t = (arc - self.cumulative[i]) / self.seg_lengths[i]
        return a + t * ab, ab / self.seg_lengths[i], float(self.width_at_arc(arc))


def crack_mask(bands: list[CrackBand], coords: np.ndarray) -> np.ndarray:
    inside = np.zeros(len(coords), dtype=bool)
    for band in bands:
        inside |= band.contains(coords)
    return inside
