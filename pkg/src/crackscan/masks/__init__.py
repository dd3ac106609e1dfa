from .pipeline import generate_prompts, refine_mask, refine_mask_detailed
from .prompts import cluster_prompts, make_crop_batches, sample_prompts
from .quality import assess_quality, count_holes
from .refiners import (
    DilateRefiner,
    ExternalRefiner,
    FloodRefiner,
    HolesRefiner,
    IdentityRefiner,
    RefinerInterface,
    get_refiner,
)
from .schemas import (
    CropOutcome,
    MaskParams,
    MaskRefinement,
    PromptSet,
    QualityVerdict,
    RefineRequest,
)
from .skeleton import (
    euclidean_distance_transform,
    extract_skeleton,
    medial_axis_transform,
)

__all__ = [
    # Types
    "CropOutcome",
    "MaskParams",
    "MaskRefinement",
    "PromptSet",
    "QualityVerdict",
    "RefineRequest",
    # Refiners
    "RefinerInterface",
    "IdentityRefiner",
    "DilateRefiner",
    "FloodRefiner",
    "HolesRefiner",
    "ExternalRefiner",
    "get_refiner",
    # Operations
    "assess_quality",
    "cluster_prompts",
    "count_holes",
    "euclidean_distance_transform",
    "extract_skeleton",
    "generate_prompts",
    "make_crop_batches",
    "medial_axis_transform",
    "refine_mask",
    "refine_mask_detailed",
    "sample_prompts",
]
