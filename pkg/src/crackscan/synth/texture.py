import numpy as np

from .schemas import TextureSpec

CRACK_ALBEDO = 0.08
_LATTICE = 256


class ValueNoise:
    """Band-limited 3D value noise in ``[0.15, 0.9]``.

    Random values on an integer lattice of cell size ``scale`` are blended
    with smoothstep weights; octaves halve the cell size and the amplitude.
    """

    def __init__(self, spec: TextureSpec, seed: int):
        self.spec = spec
        rng = np.random.default_rng(seed)
        self._perm = rng.permutation(_LATTICE)
        self._values = rng.random(_LATTICE)

    def _hash(self, ix: np.ndarray, iy: np.ndarray, iz: np.ndarray) -> np.ndarray:
        p = self._perm
        m = _LATTICE - 1
        return p[(p[(p[ix & m] + iy) & m] + iz) & m]

    def _octave(self, points: np.ndarray, cell: float) -> np.ndarray:
        q = points / cell
        base = np.floor(q).astype(np.int64)
        f = q - base
        s = f * f * (3.0 - 2.0 * f)
        total = np.zeros(len(points))
        for dx in (0, 1):
            wx = s[:, 0] if dx else 1.0 - s[:, 0]
            for dy in (0, 1):
                wy = s[:, 1] if dy else 1.0 - s[:, 1]
                for dz in (0, 1):
                    wz = s[:, 2] if dz else 1.0 - s[:, 2]
                    h = self._hash(base[:, 0] + dx, base[:, 1] + dy, base[:, 2] + dz)
                    total += wx * wy * wz * self._values[h]
        return total

    def __call__(self, points: np.ndarray) -> np.ndarray:
        pts = np.asarray(points, dtype=np.float64).reshape(-1, 3)
        if self.spec.kind == "constant":
            return np.full(len(pts), 0.5)
        total = np.zeros(len(pts))
        amp_sum = 0.0
        for octave in range(self.spec.octaves):
            amp = 0.5**octave
            total += amp * self._octave(pts, self.spec.scale / 2**octave)
            amp_sum += amp
        return 0.15 + 0.75 * total / amp_sum


def albedo(
    texture: ValueNoise, points: np.ndarray, on_crack: np.ndarray
) -> np.ndarray:
    """Surface reflectance in ``[0, 1]``; cracks are dark."""
    value = texture(points)
    value[np.asarray(on_crack, dtype=bool)] = CRACK_ALBEDO
    return value


def to_gray(value: np.ndarray) -> np.ndarray:
    return np.clip(np.floor(255.0 * value + 0.5), 0, 255).astype(np.uint8)
