from dataclasses import dataclass
from typing import Optional

import pytest

from crackscan.exceptions import (
    BehindCamera,
    CrackscanError,
    DegenerateJoint,
    EmptySkeleton,
    IoError,
    NonMonotonicTimestamps,
    ParseError,
    StageError,
    TooFewPoints,
    ValidationError,
    exit_code_for,
)


@dataclass
class ExitCodeTestCase:
    name: str
    error: Optional[BaseException]
    expected: int


exit_code_test_cases = [
    ExitCodeTestCase(name="Success", error=None, expected=0),
    ExitCodeTestCase(name="Validation error", error=ValidationError(), expected=2),
    ExitCodeTestCase(
        name="Stage failure",
        error=StageError("fuse", original_error=DegenerateJoint()),
        expected=1,
    ),
    ExitCodeTestCase(name="Domain error", error=EmptySkeleton(), expected=1),
    ExitCodeTestCase(name="IO error", error=IoError(), expected=1),
    ExitCodeTestCase(name="Filesystem error", error=OSError("disk"), expected=1),
]


class TestExceptionHierarchy:
    @pytest.mark.parametrize(
        "error_cls",
        [ValidationError, ParseError, IoError, BehindCamera, TooFewPoints, StageError],
    )
    def test_all_errors_derive_from_base(self, error_cls):
        assert issubclass(error_cls, CrackscanError)

    def test_default_message(self):
        assert str(BehindCamera()) == BehindCamera.default_message

    def test_stage_tag_is_rendered(self):
        error = EmptySkeleton().with_stage("refine-masks")

        assert str(error) == f"[refine-masks] {EmptySkeleton.default_message}"

    def test_with_stage_keeps_first_tag(self):
        error = EmptySkeleton().with_stage("edges").with_stage("measure")

        assert error.stage == "edges"

    def test_parse_error_location(self):
        error = ParseError("Bad header", path="cloud.ply", line=3)

        assert error.line == 3
        assert "cloud.ply" in str(error)
        assert "line: 3" in str(error)

    def test_parse_error_byte_offset(self):
        error = ParseError(path="cloud.ply", offset=128)

        assert "byte offset: 128" in str(error)

    def test_too_few_points_message(self):
        error = TooFewPoints(required=61, actual=10)

        assert error.required == 61
        assert "61" in str(error) and "10" in str(error)

    def test_non_monotonic_timestamps_line(self):
        error = NonMonotonicTimestamps(line=7)

        assert error.line == 7
        assert "line 7" in str(error)

    def test_stage_error_wraps_original(self):
        original = DegenerateJoint()
        error = StageError("calibrate", original_error=original)

        assert error.stage == "calibrate"
        assert error.original_error is original


class TestExitCodes:
    @pytest.mark.parametrize(
        "case", exit_code_test_cases, ids=[c.name for c in exit_code_test_cases]
    )
    def test_exit_code_for(self, case: ExitCodeTestCase):
        assert exit_code_for(case.error) == case.expected
