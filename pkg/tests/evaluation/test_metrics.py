import logging
from dataclasses import dataclass

import numpy as np
import pytest

from crackscan.evaluation.metrics import (
    confusion_counts,
    dimension_error,
    miou,
    point_surface_density,
    surface_roughness,
)
from crackscan.evaluation.schemas import ConfusionCounts
from crackscan.exceptions import DimensionMismatch, NonPositiveReference
from crackscan.formats.schemas import BinaryMask, PointCloud


@dataclass
class MiouCase:
    name: str
    gt: list[list[int]]
    pred: list[list[int]]
    expected: float


MIOU_CASES = [
    MiouCase(
        name="Identical",
        gt=[[1, 0], [0, 0]],
        pred=[[1, 0], [0, 0]],
        expected=1.0,
    ),
    MiouCase(
        name="Both empty",
        gt=[[0, 0], [0, 0]],
        pred=[[0, 0], [0, 0]],
        expected=1.0,
    ),
    MiouCase(
        name="Half overlap",
        gt=[[1, 1], [0, 0]],
        pred=[[1, 0], [1, 0]],
        expected=1.0 / 3.0,
    ),
    MiouCase(
        name="Inverted",
        gt=[[1, 1], [0, 0]],
        pred=[[0, 0], [1, 1]],
        expected=0.0,
    ),
]


def _mask(rows) -> BinaryMask:
    return BinaryMask(bits=np.array(rows, dtype=bool))


def _direct_miou(pred: np.ndarray, gt: np.ndarray) -> float:
    scores = []
    for cls in (False, True):
        inter = np.logical_and(pred == cls, gt == cls).sum()
        union = np.logical_or(pred == cls, gt == cls).sum()
        scores.append(inter / union if union else 1.0)
    return float(np.mean(scores))


class TestSegmentationMetrics:
    @pytest.mark.parametrize("case", MIOU_CASES, ids=[c.name for c in MIOU_CASES])
    def test_miou(self, case: MiouCase):
        assert miou(_mask(case.pred), _mask(case.gt)) == pytest.approx(case.expected)

    def test_confusion_rows_follow_ground_truth(self):
        gt = _mask([[1, 1, 1], [0, 0, 0]])
        pred = _mask([[1, 0, 0], [1, 1, 0]])

        counts = confusion_counts(pred, gt)

        assert counts.matrix.tolist() == [[1, 2], [2, 1]]
        assert counts.total == 6

    def test_empty_class_scores_one(self):
        counts = ConfusionCounts(matrix=[[6, 0], [0, 0]])

        assert counts.iou().tolist() == [1.0, 1.0]

    def test_band_masks(self, mask_factory):
        gt = mask_factory.vertical_band(80, 60, 38, 43)
        pred = mask_factory.vertical_band(80, 60, 39, 44)

        iou_bg, iou_crack = confusion_counts(pred, gt).iou()

        assert iou_crack == pytest.approx(4 / 6)
        assert iou_bg == pytest.approx(74 / 76)

    def test_size_mismatch(self, mask_factory):
        with pytest.raises(DimensionMismatch):
            miou(mask_factory.empty(40, 30), mask_factory.empty(30, 40))

    def test_negative_counts_are_rejected(self):
        with pytest.raises(ValueError):
            ConfusionCounts(matrix=[[1, -1], [0, 0]])

    def test_matches_direct_computation(self):
        rng = np.random.default_rng(12)
        for trial in range(120):
            shape = tuple(int(s) for s in rng.integers(1, 16, size=2))
            gt = rng.uniform(size=shape) < rng.uniform()
            pred = rng.uniform(size=shape) < rng.uniform()

            score = miou(BinaryMask(bits=pred), BinaryMask(bits=gt))

            assert score == pytest.approx(_direct_miou(pred, gt), abs=1e-12), trial
            assert score == pytest.approx(
                miou(BinaryMask(bits=gt), BinaryMask(bits=pred)), abs=1e-12
            )


class TestGeometryMetrics:
    def test_density_counts_other_points(self, cloud_factory):
        cloud = cloud_factory.grid(5, 5, spacing=1.0)

        density = point_surface_density(cloud, radius=1.01)

        assert density.mean == pytest.approx(3.2)
        assert density.std == pytest.approx(np.sqrt(0.48))
        assert density.count == 25

    def test_density_of_empty_cloud(self):
        density = point_surface_density(PointCloud(points=np.zeros((0, 3))))

        assert (density.mean, density.count) == (0.0, 0)

    def test_flat_surface_is_smooth(self, cloud_factory):
        roughness = surface_roughness(
            cloud_factory.grid(8, 8, spacing=0.01), radius=0.025
        )

        assert roughness.mean == pytest.approx(0.0, abs=1e-12)
        assert roughness.count == 64

    def test_isolated_points_are_skipped(self, cloud_factory, caplog):
        grid = cloud_factory.grid(6, 6, spacing=0.01)
        points = np.vstack([grid.points, [[1.0, 1.0, 1.0], [2.0, 2.0, 2.0]]])

        with caplog.at_level(logging.INFO, logger="crackscan.evaluation.metrics"):
            roughness = surface_roughness(PointCloud(points=points), radius=0.025)

        assert roughness.skipped == 2
        assert roughness.count == 36
        assert "skipped 2 points" in caplog.text

    def test_rough_surface(self, cloud_factory):
        smooth = cloud_factory.noisy_plane(1500, sigma=0.0005, size=0.5, seed=1)
        rough = cloud_factory.noisy_plane(1500, sigma=0.002, size=0.5, seed=1)

        assert (
            surface_roughness(rough, 0.05).mean
            > 2.0 * surface_roughness(smooth, 0.05).mean
        )

    @pytest.mark.parametrize(
        "reference, expected",
        [(5.0, 0.0), (4.0, 0.25), (10.0, 0.5)],
    )
    def test_dimension_error(self, reference, expected):
        error = dimension_error((0.0, 0.0, 0.0), (3.0, 4.0, 0.0), reference)

        assert error == pytest.approx(expected)

    def test_dimension_error_needs_positive_reference(self):
        with pytest.raises(NonPositiveReference):
            dimension_error((0.0, 0.0, 0.0), (1.0, 0.0, 0.0), 0.0)
