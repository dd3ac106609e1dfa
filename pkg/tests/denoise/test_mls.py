import numpy as np
import pytest

from crackscan.denoise.mls import (
    fit_mls_polynomial,
    mls_smooth,
    polynomial_terms,
    required_neighbors,
)
from crackscan.denoise.schemas import MlsConfig
from crackscan.exceptions import (
    DegenerateNeighborhood,
    InsufficientNeighbors,
    ValidationError,
)
from crackscan.formats.schemas import PointCloud


def tilted_plane(n: int = 400, seed: int = 0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    xy = rng.uniform(0.0, 0.2, size=(n, 2))
    z = 0.3 * xy[:, 0] + 0.2 * xy[:, 1] + 1.0
    return np.column_stack([xy, z])


class TestPolynomialTerms:
    @pytest.mark.parametrize(
        "degree, expected",
        [
            (1, [(0, 0), (1, 0), (0, 1)]),
            (2, [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]),
        ],
    )
    def test_order(self, degree, expected):
        assert polynomial_terms(degree) == expected

    @pytest.mark.parametrize("degree, count", [(1, 3), (2, 6), (3, 10)])
    def test_required_neighbors(self, degree, count):
        assert required_neighbors(degree) == len(polynomial_terms(degree)) == count


class TestFitMlsPolynomial:
    def test_plane_is_reproduced(self):
        points = tilted_plane()
        cfg = MlsConfig(search_radius=0.05)
        center = points[0]

        surface = fit_mls_polynomial(center, points, cfg)

        np.testing.assert_allclose(surface.project(center), center, atol=1e-9)
        expected = np.array([-0.3, -0.2, 1.0]) / np.linalg.norm([-0.3, -0.2, 1.0])
        np.testing.assert_allclose(surface.normal, expected, atol=1e-9)
        assert surface.coefficient(2, 0) == pytest.approx(0.0, abs=1e-9)

    def test_view_direction_orients_normal(self, cloud_factory):
        cloud = cloud_factory.grid(9, 9, spacing=0.01)
        cfg = MlsConfig(search_radius=0.05, view_direction=(0.0, 0.0, -1.0))

        surface = fit_mls_polynomial(cloud.points[40], cloud, cfg)

        np.testing.assert_allclose(surface.normal, [0.0, 0.0, -1.0], atol=1e-12)

    def test_too_few_neighbors(self):
        points = np.array([[0.0, 0.0, 0.0], [0.01, 0.0, 0.0], [0.0, 0.01, 0.0]])

        with pytest.raises(InsufficientNeighbors):
            fit_mls_polynomial(points[0], points, MlsConfig(search_radius=0.05))

    def test_collinear_neighborhood(self):
        points = np.column_stack(
            [np.linspace(0.0, 0.04, 10), np.zeros(10), np.zeros(10)]
        )

        with pytest.raises(DegenerateNeighborhood):
            fit_mls_polynomial(points[5], points, MlsConfig(search_radius=0.05))

    def test_radius_is_required(self):
        with pytest.raises(ValidationError):
            fit_mls_polynomial(np.zeros(3), tilted_plane(), MlsConfig())


class TestMlsSmooth:
    def test_exact_plane_is_a_fixed_point(self):
        cloud = PointCloud(points=tilted_plane())

        result = mls_smooth(cloud, MlsConfig(search_radius=0.05))

        np.testing.assert_allclose(result.cloud.points, cloud.points, atol=1e-9)
        assert result.fallback_count == 0

    def test_noise_is_reduced(self, cloud_factory):
        cloud = cloud_factory.noisy_plane(3000, sigma=0.002, size=1.0, seed=4)
        cfg = MlsConfig(search_radius=0.08, polynomial_degree=1)

        result = mls_smooth(cloud, cfg)

        assert np.std(result.cloud.points[:, 2]) < 0.7 * np.std(cloud.points[:, 2])

    def test_isolated_point_passes_through(self, cloud_factory):
        grid = cloud_factory.grid(10, 10, spacing=0.01)
        points = np.vstack([grid.points, [[5.0, 5.0, 5.0]]])

        result = mls_smooth(PointCloud(points=points), MlsConfig(search_radius=0.03))

        assert result.fallback_count == 1
        np.testing.assert_array_equal(result.cloud.points[-1], [5.0, 5.0, 5.0])

    def test_default_radius_follows_spacing(self, cloud_factory):
        result = mls_smooth(cloud_factory.grid(10, 10, spacing=0.01))

        assert result.radius == pytest.approx(0.05)

    def test_workers_do_not_change_result(self, cloud_factory):
        cloud = cloud_factory.noisy_plane(800, sigma=0.001, size=0.5, seed=2)

        one = mls_smooth(cloud, MlsConfig(search_radius=0.06))
        many = mls_smooth(cloud, MlsConfig(search_radius=0.06, workers=3))

        np.testing.assert_array_equal(one.cloud.points, many.cloud.points)

    def test_attributes_are_kept(self, cloud_factory):
        grid = cloud_factory.grid(6, 6, spacing=0.01)
        cloud = grid.with_attributes(intensity=np.arange(36.0))

        result = mls_smooth(cloud, MlsConfig(search_radius=0.03))

        np.testing.assert_array_equal(result.cloud.intensity, np.arange(36.0))

    def test_empty_cloud(self):
        result = mls_smooth(PointCloud(points=np.zeros((0, 3))))

        assert len(result.cloud) == 0
