from .direction import skeleton_direction, snap_to_skeleton
from .edges import perpendicular, trace_edges
from .measure import compute_error_stats, measure_crack, measure_sites
from .plane import (
    find_3d_edge,
    fit_local_plane,
    grid_count,
    ray_hit,
    refine_3d_edge,
    sample_plane_points,
)
from .schemas import (
    CrackMeasurement,
    EdgeMatch,
    ErrorStats,
    LocalPlane,
    MetrologyFrame,
    MetrologyParams,
    SiteFailure,
    SiteResults,
    edge_distance,
)

__all__ = [
    "CrackMeasurement",
    "EdgeMatch",
    "ErrorStats",
    "LocalPlane",
    "MetrologyFrame",
    "MetrologyParams",
    "SiteFailure",
    "SiteResults",
    "compute_error_stats",
    "edge_distance",
    "find_3d_edge",
    "fit_local_plane",
    "grid_count",
    "measure_crack",
    "measure_sites",
    "perpendicular",
    "ray_hit",
    "refine_3d_edge",
    "sample_plane_points",
    "skeleton_direction",
    "snap_to_skeleton",
    "trace_edges",
]
