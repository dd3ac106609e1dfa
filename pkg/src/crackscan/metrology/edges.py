import numpy as np
from numpy.typing import ArrayLike
from scipy import ndimage

from ..exceptions import OpenBoundary, SeedOutsideMask
from ..formats.schemas import BinaryMask

Pixel2 = tuple[float, float]

OCCUPANCY_THRESHOLD = 0.5


def perpendicular(direction: ArrayLike) -> np.ndarray:
    """``direction`` rotated by +90 degrees: ``(-dv, du)``."""
    du, dv = np.asarray(direction, dtype=np.float64)
    return np.array([-dv, du])


def _march(
    occupancy: np.ndarray, seed: np.ndarray, step_vec: np.ndarray
) -> np.ndarray:
    h, w = occupancy.shape
    # steps until the position leaves [0, W-1] x [0, H-1]
    limits = []
    for axis, size in ((0, w), (1, h)):
        s = step_vec[axis]
        if s > 0:
            limits.append((size - 1 - seed[axis]) / s)
        elif s < 0:
            limits.append(-seed[axis] / s)
    n_steps = int(np.floor(min(limits) + 1e-9)) if limits else 0

    k = np.arange(1, n_steps + 1)
    pos = seed[None, :] + k[:, None] * step_vec[None, :]
    occ = ndimage.map_coordinates(
        occupancy, [pos[:, 1], pos[:, 0]], order=1, mode="nearest"
    )
    outside = np.flatnonzero(occ < OCCUPANCY_THRESHOLD)
    if len(outside) == 0:
        raise OpenBoundary()
    first = outside[0]
    return seed if first == 0 else pos[first - 1]


def trace_edges(
    mask: BinaryMask,
    seed: Pixel2,
    direction: ArrayLike,
    step: float = 0.25,
) -> tuple[Pixel2, Pixel2]:
    """Sub-pixel crack edges on both sides of ``seed``.

    Marches from ``seed`` along ``-perp`` (left) and ``+perp`` (right) of
    ``direction`` in ``step`` pixel increments, sampling the mask
    bilinearly; an edge is the last position whose occupancy is at least
    one half.

    Raises:
        SeedOutsideMask: The seed's nearest pixel is background.
        OpenBoundary: The march left the image while still on the crack.
    """
    s = np.asarray(seed, dtype=np.float64)
    col, row = int(np.floor(s[0] + 0.5)), int(np.floor(s[1] + 0.5))
    in_image = 0 <= col < mask.width and 0 <= row < mask.height
    if not in_image or not mask.bits[row, col]:
        raise SeedOutsideMask(f"Seed {tuple(seed)} lies on background.")

    occupancy = mask.bits.astype(np.float64)
    perp = perpendicular(direction)
    perp /= np.linalg.norm(perp)
    left = _march(occupancy, s, -step * perp)
    right = _march(occupancy, s, step * perp)
    return (float(left[0]), float(left[1])), (float(right[0]), float(right[1]))
