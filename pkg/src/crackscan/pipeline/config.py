import logging
from pathlib import Path
from typing import Any, Mapping

import yaml
from pydantic import ValidationError as PydanticValidationError

from ..exceptions import IoError, ParseError, ValidationError
from .schemas import PipelineConfig

log = logging.getLogger(__name__)


def parse_pipeline_config(
    data: Mapping[str, Any], base_dir: str | Path | None = None
) -> PipelineConfig:
    """Validate a configuration mapping and resolve its paths.

    Relative input paths and the output directory are resolved against
    ``base_dir`` when it is given.
    """
    try:
        config = PipelineConfig.model_validate(data)
    except PydanticValidationError as e:
        raise ValidationError(
            f"Invalid pipeline configuration: {e.error_count()} error(s)",
            errors=e.errors(include_url=False),
        ) from e
    if base_dir is None:
        return config
    base = Path(base_dir)
    return config.model_copy(
        update={
            "paths": config.paths.resolved(base),
            "output_dir": base / config.output_dir,
        }
    )


def load_pipeline_config(path: str | Path) -> PipelineConfig:
    """Read a YAML run configuration."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise IoError(f"Cannot read {path}: {e}", original_error=e) from e
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise ParseError(f"Invalid YAML: {e}", path=str(path)) from e
    if not isinstance(data, Mapping):
        raise ParseError("Expected a mapping at the top level", path=str(path))
    config = parse_pipeline_config(data, base_dir=path.parent)
    log.debug("Loaded pipeline configuration from %s", path)
    return config


def validate_paths(config: PipelineConfig) -> None:
    """Fail before any compute when an input file is missing."""
    missing = config.paths.missing()
    if missing:
        raise ValidationError(
            "Missing input files: " + ", ".join(missing),
            errors=[{"loc": ("paths",), "msg": m} for m in missing],
        )
