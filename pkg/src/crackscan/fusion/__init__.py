from .fuse import (
    accumulate_observations,
    fuse_cloud,
    fuse_point,
    highlight_cracks,
    select_keyframes,
)
from .schemas import (
    FusedPoint,
    FusionConfig,
    FusionFrame,
    KeyframeConfig,
    ObservationTable,
    ViewObservation,
)
from .scoring import (
    distance_scores,
    orientation_scores,
    score_distance,
    score_orientation,
)
from .visibility import hpr_visible, spherical_flip

__all__ = [
    "FusedPoint",
    "FusionConfig",
    "FusionFrame",
    "KeyframeConfig",
    "ObservationTable",
    "ViewObservation",
    "accumulate_observations",
    "distance_scores",
    "fuse_cloud",
    "fuse_point",
    "highlight_cracks",
    "hpr_visible",
    "orientation_scores",
    "score_distance",
    "score_orientation",
    "select_keyframes",
    "spherical_flip",
]
