"""Small text artifacts that accompany a scene: camera, frames, seeds and
reference widths."""

import logging
from pathlib import Path
from typing import Iterable

import yaml
from pydantic import ValidationError as PydanticValidationError

from ..exceptions import IoError, ParseError
from ..geometry.schemas import CameraModel
from .schemas import FrameEntry, SeedEntry

log = logging.getLogger(__name__)


def _read_text(path: str | Path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError as e:
        raise ParseError("File is not UTF-8 text.", path=str(path)) from e
    except OSError as e:
        raise IoError(f"Cannot read {path}: {e}", original_error=e) from e


def _write_text(path: str | Path, text: str) -> None:
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as e:
        raise IoError(f"Cannot write {path}: {e}", original_error=e) from e


def _data_lines(path: str | Path):
    for lineno, line in enumerate(_read_text(path).splitlines(), start=1):
        stripped = line.strip()
        if stripped and not stripped.startswith("#"):
            yield lineno, stripped.split()


def load_camera(path: str | Path) -> CameraModel:
    try:
        data = yaml.safe_load(_read_text(path))
    except yaml.YAMLError as e:
        raise ParseError(f"Invalid camera YAML: {e}", path=str(path)) from e
    if not isinstance(data, dict):
        raise ParseError("Camera file must be a mapping.", path=str(path))
    try:
        return CameraModel.model_validate(data)
    except PydanticValidationError as e:
        raise ParseError(f"Invalid camera parameters: {e}", path=str(path)) from e


def save_camera(cam: CameraModel, path: str | Path) -> None:
    _write_text(path, cam.to_yaml())


def load_frames(path: str | Path) -> list[FrameEntry]:
    base = Path(path).parent
    frames = []
    for lineno, parts in _data_lines(path):
        if len(parts) not in (3, 4):
            raise ParseError(
                "Expected 'frame_id timestamp image [mask]'.",
                path=str(path),
                line=lineno,
            )
        try:
            timestamp = float(parts[1])
        except ValueError as e:
            raise ParseError("Invalid timestamp.", path=str(path), line=lineno) from e
        frames.append(
            FrameEntry(
                frame_id=parts[0],
                timestamp=timestamp,
                image=base / parts[2],
                mask=base / parts[3] if len(parts) == 4 else None,
            )
        )
    return frames


def save_frames(frames: Iterable[FrameEntry], path: str | Path) -> None:
    base = Path(path).parent
    lines = []
    for f in frames:
        parts = [f.frame_id, repr(float(f.timestamp)), _relative(f.image, base)]
        if f.mask is not None:
            parts.append(_relative(f.mask, base))
        lines.append(" ".join(parts))
    _write_text(path, "".join(line + "\n" for line in lines))


def _relative(p: Path, base: Path) -> str:
    try:
        return Path(p).relative_to(base).as_posix()
    except ValueError:
        return Path(p).as_posix()


def load_seeds(path: str | Path) -> list[SeedEntry]:
    seeds = []
    for lineno, parts in _data_lines(path):
        if len(parts) != 4:
            raise ParseError(
                "Expected 'crack_id u v frame_id'.", path=str(path), line=lineno
            )
        try:
            u, v = float(parts[1]), float(parts[2])
        except ValueError as e:
            raise ParseError("Invalid seed pixel.", path=str(path), line=lineno) from e
        seeds.append(SeedEntry(crack_id=parts[0], u=u, v=v, frame_id=parts[3]))
    return seeds


def save_seeds(seeds: Iterable[SeedEntry], path: str | Path) -> None:
    _write_text(
        path,
        "".join(f"{s.crack_id} {s.u!r} {s.v!r} {s.frame_id}\n" for s in seeds),
    )


def load_reference_widths(path: str | Path) -> dict[str, float]:
    """Read ``crack_id width_mm`` lines."""
    widths = {}
    for lineno, parts in _data_lines(path):
        if len(parts) != 2:
            raise ParseError(
                "Expected 'crack_id width_mm'.", path=str(path), line=lineno
            )
        try:
            widths[parts[0]] = float(parts[1])
        except ValueError as e:
            raise ParseError("Invalid width.", path=str(path), line=lineno) from e
    return widths


def save_reference_widths(widths: dict[str, float], path: str | Path) -> None:
    _write_text(path, "".join(f"{k} {v!r}\n" for k, v in widths.items()))
