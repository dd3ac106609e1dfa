"""Pluggable mask refiners.

A refiner receives a ``RefineRequest`` and returns a crop-sized mask. The
in-process refiners are deterministic stand-ins for a promptable
segmentation model; ``ExternalRefiner`` talks to any program over stdin and
stdout using this byte protocol::

    request:  P5 crop image, "\\n", "<count>\\n", then "<u> <v>\\n" per prompt
    response: P5 mask of the crop size (values >= 128 are foreground)
"""

import abc
import asyncio
import logging
import shlex
from typing import Optional

import numpy as np
from scipy import ndimage

from ..exceptions import ParseError, RefinerError, UnsupportedFormat, ValidationError
from ..formats.raster import MASK_THRESHOLD, decode_image, encode_image
from ..formats.schemas import BinaryMask, RasterImage
from .schemas import RefineRequest

log = logging.getLogger(__name__)


class RefinerInterface(abc.ABC):
    name: str = "refiner"

    @abc.abstractmethod
    async def refine(self, request: RefineRequest) -> BinaryMask:
        """Return a mask with the same dimensions as ``request.image``."""


class IdentityRefiner(RefinerInterface):
    name = "identity"

    async def refine(self, request: RefineRequest) -> BinaryMask:
        return BinaryMask(bits=request.prior.bits.copy())


class DilateRefiner(RefinerInterface):
    name = "dilate"

    def __init__(self, pixels: int = 1):
        if pixels < 1:
            raise ValidationError("dilation must be at least one pixel")
        self.pixels = pixels

    async def refine(self, request: RefineRequest) -> BinaryMask:
        bits = ndimage.binary_dilation(request.prior.bits, iterations=self.pixels)
        return BinaryMask(bits=bits)


class FloodRefiner(RefinerInterface):
    """Adversarial refiner that claims the whole crop."""

    name = "flood"

    async def refine(self, request: RefineRequest) -> BinaryMask:
        return BinaryMask(bits=np.ones_like(request.prior.bits))


class HolesRefiner(RefinerInterface):
    """Adversarial refiner that thickens the prior and punches isolated holes."""

    name = "holes"

    def __init__(self, holes: int = 3):
        self.holes = holes

    async def refine(self, request: RefineRequest) -> BinaryMask:
        bits = ndimage.binary_dilation(request.prior.bits, iterations=1)
        interior = ndimage.binary_erosion(
            bits, structure=np.ones((3, 3), dtype=bool), border_value=0
        )
        punched: list[tuple[int, int]] = []
        for r, c in zip(*np.nonzero(interior)):
            if len(punched) == self.holes:
                break
            if all(max(abs(r - pr), abs(c - pc)) >= 3 for pr, pc in punched):
                punched.append((int(r), int(c)))
        for r, c in punched:
            bits[r, c] = False
        return BinaryMask(bits=bits)


class ExternalRefiner(RefinerInterface):
    name = "external"

    def __init__(self, command: str, timeout: Optional[float] = 60.0):
        self.argv = shlex.split(command)
        if not self.argv:
            raise ValidationError("external refiner needs a command")
        self.timeout = timeout

    def _encode_request(self, request: RefineRequest) -> bytes:
        lines = [f"{len(request.prompts)}"]
        lines += [f"{int(u)} {int(v)}" for u, v in request.prompts]
        payload = "\n".join(lines) + "\n"
        return encode_image(request.image.gray()) + b"\n" + payload.encode("ascii")

    async def refine(self, request: RefineRequest) -> BinaryMask:
        try:
            process = await asyncio.create_subprocess_exec(
                *self.argv,
                stdin=asyncio.subprocess.PIPE,
                stdout=asyncio.subprocess.PIPE,
                stderr=asyncio.subprocess.PIPE,
            )
        except OSError as e:
            raise RefinerError(f"Cannot start {self.argv[0]}: {e}") from e

        try:
            stdout, stderr = await asyncio.wait_for(
                process.communicate(self._encode_request(request)), self.timeout
            )
        except asyncio.TimeoutError as e:
            process.kill()
            await process.wait()
            raise RefinerError(f"{self.argv[0]} timed out after {self.timeout}s") from e

        if process.returncode != 0:
            detail = stderr.decode("utf-8", "replace").strip()
            raise RefinerError(
                f"{self.argv[0]} exited with {process.returncode}: {detail}"
            )
        try:
            gray = RasterImage(pixels=decode_image(stdout)).gray()
        except (ParseError, UnsupportedFormat) as e:
            raise RefinerError(f"Invalid mask from {self.argv[0]}: {e}") from e
        mask = BinaryMask(bits=gray >= MASK_THRESHOLD)
        if mask.bits.shape != request.prior.bits.shape:
            raise RefinerError(
                f"Refiner returned {mask.width}x{mask.height}, "
                f"expected {request.prior.width}x{request.prior.height}"
            )
        return mask


def get_refiner(spec: str) -> RefinerInterface:
    """Build a refiner from ``identity``, ``dilate[:px]``, ``flood``,
    ``holes[:n]`` or ``external:<command>``."""
    name, _, arg = spec.partition(":")
    try:
        if name == "identity":
            return IdentityRefiner()
        if name == "dilate":
            return DilateRefiner(int(arg) if arg else 1)
        if name == "flood":
            return FloodRefiner()
        if name == "holes":
            return HolesRefiner(int(arg) if arg else 3)
        if name == "external":
            return ExternalRefiner(arg)
    except ValueError as e:
        raise ValidationError(f"Invalid refiner argument in '{spec}'.") from e
    raise ValidationError(f"Unknown refiner '{spec}'.")
