import numpy as np
from scipy import ndimage
from skimage.morphology import medial_axis

from ..formats.schemas import BinaryMask


def euclidean_distance_transform(mask: BinaryMask) -> np.ndarray:
    """Exact distance (pixels) from each foreground pixel to the nearest
    background pixel; background pixels are 0.

    A mask without any background pixel yields ``inf`` everywhere.
    """
    bits = mask.bits
    if bits.size and bits.all():
        return np.full(bits.shape, np.inf)
    return ndimage.distance_transform_edt(bits).astype(np.float64)


def medial_axis_transform(mask: BinaryMask) -> tuple[BinaryMask, np.ndarray]:
    """Medial axis of the mask together with its distance transform.

    Ties between equally deep pixels are broken with a fixed seed.
    """
    bits = mask.bits
    if not bits.any():
        return BinaryMask(bits=np.zeros_like(bits)), np.zeros(bits.shape)
    axis, distance = medial_axis(bits, return_distance=True, rng=0)
    if bits.all():
        distance = euclidean_distance_transform(mask)
    return BinaryMask(bits=axis & bits), distance.astype(np.float64)


def extract_skeleton(mask: BinaryMask) -> BinaryMask:
    """One-pixel-wide, 8-connected medial axis that keeps the mask's topology."""
    return medial_axis_transform(mask)[0]
