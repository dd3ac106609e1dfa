"""Local crack direction from the skeleton around a seed pixel."""

import numpy as np
from scipy import ndimage

from ..exceptions import SeedOffSkeleton, ZeroGradient
from ..formats.schemas import BinaryMask

Pixel = tuple[int, int]


def snap_to_skeleton(
    skeleton: BinaryMask, seed: tuple[float, float], radius: float = 2.0
) -> Pixel:
    """Nearest skeleton pixel ``(u, v)`` within ``radius`` of ``seed``.

    Ties go to the smaller row, then the smaller column.
    """
    u, v = seed
    r = int(np.ceil(radius)) + 1
    iu, iv = int(np.floor(u)), int(np.floor(v))
    c0, c1 = max(iu - r, 0), min(iu + r + 2, skeleton.width)
    r0, r1 = max(iv - r, 0), min(iv + r + 2, skeleton.height)
    rows, cols = np.nonzero(skeleton.bits[r0:r1, c0:c1])
    if len(rows) == 0:
        raise SeedOffSkeleton(f"No skeleton pixel within {radius:g} px of {seed}.")
    rows, cols = rows + r0, cols + c0
    dist = np.hypot(cols - u, rows - v)
    near = dist <= radius + 1e-9
    if not np.any(near):
        raise SeedOffSkeleton(f"No skeleton pixel within {radius:g} px of {seed}.")
    order = np.lexsort((cols[near], rows[near], dist[near]))
    best = order[0]
    return int(cols[near][best]), int(rows[near][best])


def skeleton_direction(
    skeleton: BinaryMask,
    seed: tuple[float, float],
    window: int = 15,
    sigma: float = 1.5,
    snap_radius: float = 2.0,
) -> np.ndarray:
    """Unit along-crack direction ``(du, dv)`` at ``seed``.

    The skeleton neighborhood is Gaussian smoothed and differentiated with
    Sobel kernels. Gradients across a ridge flip sign on either side, so
    they are averaged as a structure tensor over pixels adjacent to the
    skeleton; its principal axis crosses the crack and is rotated by 90
    degrees. The sign is canonical: ``du > 0``, or ``dv > 0`` when the
    crack is vertical.
    """
    cu, cv = snap_to_skeleton(skeleton, seed, snap_radius)
    half = window // 2
    pad = half + int(np.ceil(3 * sigma)) + 1
    r0, r1 = max(cv - pad, 0), min(cv + pad + 1, skeleton.height)
    c0, c1 = max(cu - pad, 0), min(cu + pad + 1, skeleton.width)
    region = skeleton.bits[r0:r1, c0:c1].astype(np.float64)

    smooth = ndimage.gaussian_filter(region, sigma)
    gu = ndimage.sobel(smooth, axis=1)
    gv = ndimage.sobel(smooth, axis=0)

    wr0, wr1 = max(cv - half - r0, 0), min(cv + half + 1 - r0, region.shape[0])
    wc0, wc1 = max(cu - half - c0, 0), min(cu + half + 1 - c0, region.shape[1])
    win = np.zeros_like(region, dtype=bool)
    win[wr0:wr1, wc0:wc1] = True
    adjacent = ndimage.binary_dilation(region > 0, structure=np.ones((3, 3))) & win

    su, sv = gu[adjacent], gv[adjacent]
    tensor = np.array([[su @ su, su @ sv], [su @ sv, sv @ sv]])
    if np.trace(tensor) <= 1e-12:
        raise ZeroGradient()
    _, vecs = np.linalg.eigh(tensor)
    g = vecs[:, 1]
    d = np.array([-g[1], g[0]])
    d /= np.linalg.norm(d)
    if d[0] < -1e-12 or (abs(d[0]) <= 1e-12 and d[1] < 0):
        d = -d
    return d
