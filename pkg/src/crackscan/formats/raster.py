"""Images and masks: binary portable pixmaps (P5/P6) and PNG, through Pillow.

Masks are stored as 8-bit grayscale images and binarized at 128 on load.
"""

import io
import logging
from pathlib import Path
from typing import Optional

import numpy as np
from PIL import Image, UnidentifiedImageError

from ..exceptions import IoError, ParseError, UnsupportedFormat
from .schemas import BinaryMask, RasterImage

log = logging.getLogger(__name__)

MASK_THRESHOLD = 128
SUPPORTED_FORMATS = ("PPM", "PNG")
_WIDE_MODES = ("I", "I;16", "I;16B", "I;16L", "F")


def decode_image(raw: bytes, path: Optional[str] = None) -> np.ndarray:
    """Decode a P5/P6 or PNG image held in ``raw``.

    Returns:
        Pixels shaped ``(H, W, C)`` with one or three 8-bit channels.

    Raises:
        ParseError: ``raw`` is not a readable image.
        UnsupportedFormat: Another image format, or more than 8 bits per sample.
    """
    try:
        with Image.open(io.BytesIO(raw)) as img:
            if img.format not in SUPPORTED_FORMATS:
                raise UnsupportedFormat(f"Image format {img.format} is not supported.")
            if img.mode in _WIDE_MODES:
                raise UnsupportedFormat(f"Image mode {img.mode} is not 8-bit.")
            if img.mode in ("1", "L", "LA"):
                arr = np.asarray(img.convert("L"))
            else:
                arr = np.asarray(img.convert("RGB"))
    except UnidentifiedImageError as e:
        raise ParseError("Not a PNM or PNG image.", path=path, offset=0) from e
    except (OSError, SyntaxError, ValueError) as e:
        raise ParseError(f"Invalid image: {e}", path=path) from e
    if arr.ndim == 2:
        arr = arr[:, :, None]
    return np.ascontiguousarray(arr)


def encode_image(pixels: np.ndarray, fmt: str = "PPM") -> bytes:
    """Encode ``(H, W)``, ``(H, W, 1)`` or ``(H, W, 3)`` pixels; ``PPM`` writes
    P5 for one channel and P6 for three."""
    arr = np.asarray(pixels, dtype=np.uint8)
    if arr.ndim == 3 and arr.shape[2] == 1:
        arr = arr[:, :, 0]
    buffer = io.BytesIO()
    Image.fromarray(np.ascontiguousarray(arr)).save(buffer, format=fmt)
    return buffer.getvalue()


def _read_bytes(path: str | Path) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as e:
        raise IoError(f"Cannot read {path}: {e}", original_error=e) from e


def load_image(path: str | Path, timestamp: Optional[float] = None) -> RasterImage:
    pixels = decode_image(_read_bytes(path), str(path))
    return RasterImage(pixels=pixels, timestamp=timestamp)


def load_mask(path: str | Path, like: Optional[RasterImage] = None) -> BinaryMask:
    """Load a mask and binarize it at 128.

    Args:
        path: P5/P6/PNG file.
        like: Image the mask is paired with; dimensions must match.
    """
    pixels = RasterImage(pixels=decode_image(_read_bytes(path), str(path))).gray()
    mask = BinaryMask(bits=pixels >= MASK_THRESHOLD)
    if like is not None:
        mask.check_dimensions(like.width, like.height)
    return mask


def _write(path: str | Path, pixels: np.ndarray) -> None:
    path = Path(path)
    fmt = "PNG" if path.suffix.lower() == ".png" else "PPM"
    try:
        path.write_bytes(encode_image(pixels, fmt))
    except OSError as e:
        raise IoError(f"Cannot write {path}: {e}", original_error=e) from e


def save_image(image: RasterImage, path: str | Path) -> None:
    _write(path, image.pixels)


def save_mask(mask: BinaryMask, path: str | Path) -> None:
    _write(path, mask.bits.astype(np.uint8) * 255)
