from typing import Any, Optional


class CrackscanError(Exception):
    """Base exception class for all errors raised by crackscan.

    All crackscan exceptions inherit from this, so callers can catch this
    to handle any pipeline-related error. ``stage`` is filled in by the
    orchestration layer (or by composite operations such as
    ``measure_crack``) to say where the failure happened.
    """

    default_message = "An error occurred in crackscan."

    def __init__(self, message: Optional[str] = None, *, stage: Optional[str] = None):
        self.message = message or self.default_message
        self.stage = stage
        super().__init__(self.message)

    def with_stage(self, stage: str) -> "CrackscanError":
        if self.stage is None:
            self.stage = stage
        return self

    def __str__(self) -> str:
        if self.stage:
            return f"[{self.stage}] {self.message}"
        return self.message


class ValidationError(CrackscanError):
    """Raised when parameters or configuration values are out of range."""

    def __init__(
        self,
        message: Optional[str] = None,
        errors: Optional[list[dict[str, Any]]] = None,
    ):
        self.errors = errors or []
        if message is None:
            message = "The supplied parameters were invalid."
        super().__init__(message)


class FormatError(CrackscanError):
    default_message = "The file could not be read."


class ParseError(FormatError):
    """Raised when a file violates its declared grammar.

    Carries the 1-based ``line`` for text formats or the byte ``offset``
    for binary payloads, when known.
    """

    def __init__(
        self,
        message: Optional[str] = None,
        *,
        path: Optional[str] = None,
        line: Optional[int] = None,
        offset: Optional[int] = None,
    ):
        self.path = path
        self.line = line
        self.offset = offset
        if message is None:
            message = "Malformed input."
        parts = [message]
        if path:
            parts.append(f"file: {path}")
        if line is not None:
            parts.append(f"line: {line}")
        if offset is not None:
            parts.append(f"byte offset: {offset}")
        super().__init__(" | ".join(parts))


class UnsupportedFormat(FormatError):
    default_message = "The file format or encoding is not supported."


class IoError(CrackscanError):
    """Raised for filesystem failures while reading or writing artifacts."""

    def __init__(
        self, message: Optional[str] = None, original_error: Optional[Exception] = None
    ):
        self.original_error = original_error
        if message is None:
            message = "A filesystem error occurred."
        super().__init__(message)


class DimensionMismatch(CrackscanError):
    default_message = "Raster dimensions do not match."


class NonMonotonicTimestamps(CrackscanError):
    def __init__(self, message: Optional[str] = None, line: Optional[int] = None):
        self.line = line
        if message is None:
            message = "Trajectory timestamps must be strictly increasing."
            if line is not None:
                message = f"{message} Violation at line {line}."
        super().__init__(message)


class BehindCamera(CrackscanError):
    default_message = "The point lies on or behind the camera plane (z <= 0)."


class OutOfRange(CrackscanError):
    default_message = "The requested value lies outside the valid range."


class TooFewPoints(CrackscanError):
    def __init__(
        self,
        message: Optional[str] = None,
        required: Optional[int] = None,
        actual: Optional[int] = None,
    ):
        self.required = required
        self.actual = actual
        if message is None:
            if required is not None and actual is not None:
                message = f"At least {required} points are required, got {actual}."
            else:
                message = "Too few points for this operation."
        super().__init__(message)


class DegeneratePoint(CrackscanError):
    default_message = "A point coincides with the camera center."


class InsufficientNeighbors(CrackscanError):
    default_message = "Not enough neighbors to fit the local surface."


class DegenerateNeighborhood(CrackscanError):
    default_message = "The neighborhood is rank deficient (collinear or coincident)."


class NoVisiblePoints(CrackscanError):
    default_message = "No point projects inside the image frame."


class EmptyHistogram(CrackscanError):
    default_message = "The histogram has no counts."


class DegenerateJoint(CrackscanError):
    default_message = "The joint entropy is zero; NID is undefined."


class NonFiniteObjective(CrackscanError):
    default_message = "The objective returned a non-finite value."


class EmptySkeleton(CrackscanError):
    default_message = "The skeleton has no foreground pixels."


class NoClusters(CrackscanError):
    default_message = "All prompt points were classified as noise."


class RefinerError(CrackscanError):
    default_message = "The mask refiner failed."


class SeedOffSkeleton(CrackscanError):
    default_message = "No skeleton pixel lies near the seed."


class ZeroGradient(CrackscanError):
    default_message = "The smoothed neighborhood has no gradient."


class SeedOutsideMask(CrackscanError):
    default_message = "The seed pixel is not inside the crack mask."


class OpenBoundary(CrackscanError):
    default_message = "The edge trace left the image before leaving the mask."


class RayMiss(CrackscanError):
    default_message = "The viewing ray does not pass near the point cloud."


class VerticalPlane(CrackscanError):
    default_message = "The plane is parallel to the sampling axis."


class NoProjectableSamples(CrackscanError):
    default_message = "No sampled point lies in front of the camera."


class EmptyInput(CrackscanError):
    default_message = "The input list is empty."


class NonPositiveReference(CrackscanError):
    default_message = "Reference values must be strictly positive."


class InvalidSpec(CrackscanError):
    default_message = "The scene specification is invalid."


class NotOnCrack(CrackscanError):
    default_message = "The pixel does not lie on a crack band."


class StageError(CrackscanError):
    """Raised by the pipeline when a stage fails.

    Wraps the original error so the CLI can report which stage failed.
    """

    def __init__(
        self,
        stage: str,
        message: Optional[str] = None,
        original_error: Optional[Exception] = None,
    ):
        self.original_error = original_error
        if message is None:
            message = f"Stage '{stage}' failed: {original_error}"
        super().__init__(message, stage=stage)


EXIT_OK = 0
EXIT_STAGE_FAILURE = 1
EXIT_USAGE = 2


def exit_code_for(error: Optional[BaseException]) -> int:
    """Translate an exception into the CLI exit code.

    Args:
        error: The exception that terminated the command, or None.

    Returns:
        0 on success, 2 for usage and configuration errors, 1 for any
        failure raised while computing.
    """
    if error is None:
        return EXIT_OK
    if isinstance(error, ValidationError):
        return EXIT_USAGE
    return EXIT_STAGE_FAILURE
