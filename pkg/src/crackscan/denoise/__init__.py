from .crop import crop_box
from .mls import fit_mls_polynomial, mls_smooth, polynomial_terms
from .neighbors import NeighborIndex
from .schemas import (
    CropBox,
    DenoiseConfig,
    MlsConfig,
    MlsResult,
    MlsSurface,
    SorConfig,
    SorResult,
)
from .sor import mean_neighbor_distances, sor_filter

__all__ = [
    "CropBox",
    "DenoiseConfig",
    "MlsConfig",
    "MlsResult",
    "MlsSurface",
    "NeighborIndex",
    "SorConfig",
    "SorResult",
    "crop_box",
    "fit_mls_polynomial",
    "mean_neighbor_distances",
    "mls_smooth",
    "polynomial_terms",
    "sor_filter",
]
