from .config import load_pipeline_config, parse_pipeline_config, validate_paths
from .runner import PipelineRunner, run_pipeline
from .schemas import (
    DenoiseSummary,
    EvaluationConfig,
    FrameData,
    GeometryCheck,
    MaskStageConfig,
    PathsConfig,
    PipelineConfig,
    PipelineInputs,
    RunManifest,
    StageToggles,
)

__all__ = [
    "DenoiseSummary",
    "EvaluationConfig",
    "FrameData",
    "GeometryCheck",
    "MaskStageConfig",
    "PathsConfig",
    "PipelineConfig",
    "PipelineInputs",
    "PipelineRunner",
    "RunManifest",
    "StageToggles",
    "load_pipeline_config",
    "parse_pipeline_config",
    "run_pipeline",
    "validate_paths",
]
