import numpy as np
from numpy.typing import ArrayLike

from ..exceptions import ValidationError
from ..formats.schemas import PointCloud


def crop_box(
    cloud: PointCloud, min_corner: ArrayLike, max_corner: ArrayLike
) -> PointCloud:
    """Points strictly inside the axis-aligned box."""
    lo = np.asarray(min_corner, dtype=np.float64).reshape(3)
    hi = np.asarray(max_corner, dtype=np.float64).reshape(3)
    if not np.all(lo < hi):
        raise ValidationError("Crop box min corner must be below max corner.")
    inside = np.all((cloud.points > lo) & (cloud.points < hi), axis=1)
    return cloud.subset(inside)
