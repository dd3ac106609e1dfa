import numpy as np
from scipy import ndimage

from ..exceptions import DimensionMismatch
from ..formats.schemas import BinaryMask
from .schemas import QualityVerdict

_FOUR_CONNECTED = ndimage.generate_binary_structure(2, 1)


def count_holes(mask: BinaryMask) -> int:
    """Number of background regions fully enclosed by foreground.

    The mask is inverted and its 4-connected components are labeled; every
    component that does not touch the image border is a hole.
    """
    inverted = ~mask.bits
    labels, count = ndimage.label(inverted, structure=_FOUR_CONNECTED)
    if count == 0:
        return 0
    border = np.concatenate(
        [labels[0, :], labels[-1, :], labels[:, 0], labels[:, -1]]
    )
    touching = set(np.unique(border)) - {0}
    return count - len(touching)


def assess_quality(
    base: BinaryMask,
    refined: BinaryMask,
    max_size_ratio: float = 3.0,
    max_holes: int = 2,
) -> QualityVerdict:
    """Region-size and topology check of a refined mask against its base."""
    if base.bits.shape != refined.bits.shape:
        raise DimensionMismatch(
            f"Refined mask {refined.bits.shape} differs from base {base.bits.shape}."
        )
    ratio = refined.area / max(base.area, 1)
    holes = count_holes(refined)
    reason = None
    if ratio > max_size_ratio:
        reason = f"size ratio {ratio:.3f} exceeds {max_size_ratio}"
    elif holes > max_holes:
        reason = f"{holes} holes exceed {max_holes}"
    return QualityVerdict(
        hole_count=holes, size_ratio=ratio, accepted=reason is None, reason=reason
    )
