from .bands import CrackBand, crack_mask
from .render import pixel_rays, render_view
from .scene import (
    generate_scene,
    ground_truth_width_at,
    load_scene_spec,
    parse_scene_spec,
    write_scene,
)
from .schemas import (
    CrackSpec,
    GroundTruth,
    PerturbationSpec,
    SceneFrame,
    SceneLayout,
    SceneSpec,
    ShotSpec,
    SiteSpec,
    SiteTruth,
    SurfaceSpec,
    SyntheticScene,
    TextureSpec,
)
from .surfaces import (
    BoxSurface,
    CylinderSurface,
    PlaneSurface,
    Surface,
    make_surface,
)
from .texture import ValueNoise

__all__ = [
    "BoxSurface",
    "CrackBand",
    "CrackSpec",
    "CylinderSurface",
    "GroundTruth",
    "PerturbationSpec",
    "PlaneSurface",
    "SceneFrame",
    "SceneLayout",
    "SceneSpec",
    "ShotSpec",
    "SiteSpec",
    "SiteTruth",
    "Surface",
    "SurfaceSpec",
    "SyntheticScene",
    "TextureSpec",
    "ValueNoise",
    "crack_mask",
    "generate_scene",
    "ground_truth_width_at",
    "load_scene_spec",
    "make_surface",
    "parse_scene_spec",
    "pixel_rays",
    "render_view",
    "write_scene",
]
