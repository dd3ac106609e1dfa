import logging
import shutil
from dataclasses import dataclass

import numpy as np
import pytest
from scipy import ndimage
from skimage.measure import euler_number

from crackscan.exceptions import (
    DimensionMismatch,
    EmptySkeleton,
    NoClusters,
    RefinerError,
    ValidationError,
)
from crackscan.formats.schemas import BinaryMask, RasterImage
from crackscan.masks.pipeline import (
    generate_prompts,
    refine_mask,
    refine_mask_detailed,
)
from crackscan.masks.quality import assess_quality, count_holes
from crackscan.masks.refiners import (
    DilateRefiner,
    ExternalRefiner,
    FloodRefiner,
    HolesRefiner,
    IdentityRefiner,
    RefinerInterface,
    get_refiner,
)
from crackscan.masks.schemas import MaskParams, RefineRequest


class FailingRefiner(RefinerInterface):
    name = "failing"

    async def refine(self, request: RefineRequest) -> BinaryMask:
        raise RefinerError("model unavailable")


class CrashingRefiner(RefinerInterface):
    name = "crashing"

    async def refine(self, request: RefineRequest) -> BinaryMask:
        raise RuntimeError("out of memory")


@pytest.fixture
def band(mask_factory):
    return mask_factory.vertical_band(120, 80, 50, 55)


@pytest.fixture
def image(mask_factory):
    return mask_factory.image(width=120, height=80)


class TestCountHoles:
    def test_ring_has_one_hole(self, mask_factory):
        bits = mask_factory.rect(20, 20, 2, 2, 18, 18).bits
        bits[6:14, 6:14] = False

        assert count_holes(BinaryMask(bits=bits)) == 1

    def test_background_touching_border_is_not_a_hole(self, mask_factory):
        assert count_holes(mask_factory.vertical_band(20, 20, 5, 10)) == 0

    def test_diagonal_gap_splits_holes(self):
        bits = np.ones((5, 5), dtype=bool)
        bits[1, 1] = bits[2, 2] = False

        assert count_holes(BinaryMask(bits=bits)) == 2

    def test_matches_euler_characteristic(self):
        rng = np.random.default_rng(11)
        eight = np.ones((3, 3), dtype=bool)
        for density in np.linspace(0.45, 0.8, 40):
            bits = rng.uniform(size=(24, 31)) < density
            _, objects = ndimage.label(bits, structure=eight)

            expected = objects - euler_number(bits, connectivity=2)

            assert count_holes(BinaryMask(bits=bits)) == expected

    @pytest.mark.parametrize("turns", [1, 2, 3])
    def test_rotation_invariant(self, turns):
        rng = np.random.default_rng(turns)
        bits = rng.uniform(size=(18, 27)) < 0.65

        rotated = BinaryMask(bits=np.rot90(bits, turns))

        assert count_holes(rotated) == count_holes(BinaryMask(bits=bits))

    def test_translation_invariant(self):
        rng = np.random.default_rng(4)
        bits = rng.uniform(size=(18, 27)) < 0.65

        shifted = np.pad(bits, ((7, 2), (3, 11)))

        assert count_holes(BinaryMask(bits=shifted)) == count_holes(
            BinaryMask(bits=bits)
        )


class TestAssessQuality:
    def test_identical_mask_is_accepted(self, band):
        verdict = assess_quality(band, band)

        assert verdict.accepted
        assert verdict.size_ratio == 1.0
        assert verdict.reason is None

    def test_oversized_mask_is_rejected(self, band):
        flood = BinaryMask(bits=np.ones_like(band.bits))

        verdict = assess_quality(band, flood)

        assert not verdict.accepted
        assert "size ratio" in verdict.reason

    def test_empty_base_uses_unit_area(self, mask_factory):
        verdict = assess_quality(
            mask_factory.empty(10, 10), mask_factory.rect(10, 10, 0, 0, 2, 1)
        )

        assert verdict.size_ratio == 2.0

    def test_shape_mismatch(self, mask_factory):
        with pytest.raises(DimensionMismatch):
            assess_quality(mask_factory.empty(10, 10), mask_factory.empty(10, 11))


class TestGeneratePrompts:
    def test_band_gives_one_cluster(self, band):
        prompts = generate_prompts(band, MaskParams())

        assert len(prompts.points) >= 2
        assert set(prompts.cluster_ids.tolist()) == {0}
        assert np.all(np.abs(prompts.points[:, 0] - 52) <= 2)
        u0, v0, w, h = prompts.crop_rects[0]
        assert v0 == 0 and v0 + h - 1 == 79
        assert u0 <= 20 and u0 + w - 1 >= 84

    def test_empty_mask(self, mask_factory):
        with pytest.raises(EmptySkeleton):
            generate_prompts(mask_factory.empty(), MaskParams())

    def test_sparse_prompts_are_all_noise(self, band):
        with pytest.raises(NoClusters):
            generate_prompts(band, MaskParams(eps=1.0, min_pts=2))


@dataclass
class RefinerTestCase:
    name: str
    refiner: RefinerInterface
    accepted: bool


refiner_test_cases = [
    RefinerTestCase(name="Identity", refiner=IdentityRefiner(), accepted=True),
    RefinerTestCase(name="Dilate", refiner=DilateRefiner(1), accepted=True),
    RefinerTestCase(name="Flood", refiner=FloodRefiner(), accepted=False),
    RefinerTestCase(name="Holes", refiner=HolesRefiner(3), accepted=False),
]


class TestRefineMask:
    @pytest.mark.parametrize(
        "case", refiner_test_cases, ids=[c.name for c in refiner_test_cases]
    )
    async def test_quality_gate(self, band, image, case: RefinerTestCase):
        result = await refine_mask_detailed(image, band, case.refiner)

        assert [o.verdict.accepted for o in result.outcomes] == [case.accepted]
        assert not np.any(band.bits & ~result.mask.bits)
        if not case.accepted:
            np.testing.assert_array_equal(result.mask.bits, band.bits)

    async def test_identity_refiner_is_a_fixed_point(self, band, image):
        refined = await refine_mask(image, band, IdentityRefiner())

        np.testing.assert_array_equal(refined.bits, band.bits)

    async def test_dilation_grows_the_mask(self, band, image):
        refined = await refine_mask(image, band, DilateRefiner(1))

        assert refined.area > band.area
        assert refined.bits[40, 49] and refined.bits[40, 55]

    async def test_refiner_failure_keeps_base(self, band, image):
        result = await refine_mask_detailed(image, band, FailingRefiner())

        np.testing.assert_array_equal(result.mask.bits, band.bits)
        assert result.outcomes[0].error == "model unavailable"
        assert result.accepted == 0

    async def test_unexpected_refiner_error_keeps_base(self, band, image, caplog):
        with caplog.at_level(logging.WARNING, logger="crackscan.masks.pipeline"):
            result = await refine_mask_detailed(image, band, CrashingRefiner())

        np.testing.assert_array_equal(result.mask.bits, band.bits)
        assert "out of memory" in result.outcomes[0].error
        assert result.accepted == 0
        assert "crashed" in caplog.text

    async def test_mask_and_image_dimensions_must_match(self, band, mask_factory):
        with pytest.raises(DimensionMismatch):
            await refine_mask(
                mask_factory.image(width=10, height=10), band, IdentityRefiner()
            )


class TestExternalRefiner:
    @pytest.mark.skipif(shutil.which("cat") is None, reason="needs cat")
    async def test_echoed_image_becomes_mask(self, mask_factory):
        pixels = np.zeros((4, 6), dtype=np.uint8)
        pixels[:, 2] = 255
        request = RefineRequest(
            image=RasterImage(pixels=pixels),
            prompts=[[2, 1]],
            rect=(0, 0, 6, 4),
            prior=mask_factory.empty(6, 4),
        )

        mask = await ExternalRefiner("cat").refine(request)

        np.testing.assert_array_equal(mask.bits, pixels >= 128)

    @pytest.mark.skipif(shutil.which("false") is None, reason="needs false")
    async def test_non_zero_exit(self, mask_factory):
        request = RefineRequest(
            image=mask_factory.image(width=3, height=3),
            prompts=[[1, 1]],
            rect=(0, 0, 3, 3),
            prior=mask_factory.empty(3, 3),
        )

        with pytest.raises(RefinerError, match="exited with 1"):
            await ExternalRefiner("false").refine(request)

    async def test_missing_program(self, mask_factory):
        request = RefineRequest(
            image=mask_factory.image(width=3, height=3),
            prompts=[[1, 1]],
            rect=(0, 0, 3, 3),
            prior=mask_factory.empty(3, 3),
        )

        with pytest.raises(RefinerError, match="Cannot start"):
            await ExternalRefiner("no-such-refiner-program").refine(request)


class TestGetRefiner:
    @pytest.mark.parametrize(
        "spec, cls",
        [
            ("identity", IdentityRefiner),
            ("dilate:3", DilateRefiner),
            ("flood", FloodRefiner),
            ("holes", HolesRefiner),
            ("external:segment --fast", ExternalRefiner),
        ],
    )
    def test_known_specs(self, spec, cls):
        assert isinstance(get_refiner(spec), cls)

    def test_external_command_is_split(self):
        assert get_refiner("external:segment --fast").argv == ["segment", "--fast"]

    @pytest.mark.parametrize("spec", ["magic", "dilate:x", "dilate:0", "external:"])
    def test_invalid_specs(self, spec):
        with pytest.raises(ValidationError):
            get_refiner(spec)
