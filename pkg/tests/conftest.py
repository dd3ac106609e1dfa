from typing import Callable, Optional

import numpy as np
import pytest

from crackscan.formats.schemas import BinaryMask, PointCloud, RasterImage
from crackscan.geometry.schemas import CameraModel, RigidPose
from crackscan.synth.scene import generate_scene, write_scene
from crackscan.synth.schemas import SceneLayout, SceneSpec, SyntheticScene


def pytest_addoption(parser):
    parser.addoption(
        "--run-integration",
        action="store_true",
        default=False,
        help="Run integration tests (slow acceptance suites)",
    )


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "integration: mark test as integration test (slow)"
    )


def pytest_collection_modifyitems(config, items):
    if config.getoption("--run-integration"):
        return

    skip_integration = pytest.mark.skip(
        reason="Need --run-integration option to run integration tests"
    )
    for item in items:
        if "integration" in item.keywords:
            item.add_marker(skip_integration)


class CloudFactory:
    """Factory for small synthetic point clouds."""

    @staticmethod
    def grid(
        nx: int = 10,
        ny: int = 10,
        spacing: float = 0.01,
        z: float = 0.0,
        origin: tuple[float, float] = (0.0, 0.0),
    ) -> PointCloud:
        xs = origin[0] + spacing * np.arange(nx)
        ys = origin[1] + spacing * np.arange(ny)
        gx, gy = np.meshgrid(xs, ys, indexing="ij")
        pts = np.column_stack([gx.ravel(), gy.ravel(), np.full(gx.size, z)])
        return PointCloud(points=pts)

    @staticmethod
    def noisy_plane(
        n: int, sigma: float, size: float = 1.0, seed: int = 0
    ) -> PointCloud:
        rng = np.random.default_rng(seed)
        xy = rng.uniform(0.0, size, size=(n, 2))
        z = rng.normal(0.0, sigma, size=n)
        return PointCloud(points=np.column_stack([xy, z]))

    @staticmethod
    def from_points(points, **attributes) -> PointCloud:
        return PointCloud(points=np.asarray(points, dtype=np.float64), **attributes)


class MaskFactory:
    """Factory for binary masks and images."""

    @staticmethod
    def empty(width: int = 40, height: int = 30) -> BinaryMask:
        return BinaryMask.empty(width, height)

    @staticmethod
    def rect(
        width: int,
        height: int,
        u0: int,
        v0: int,
        u1: int,
        v1: int,
    ) -> BinaryMask:
        """Foreground on columns ``u0..u1-1`` and rows ``v0..v1-1``."""
        bits = np.zeros((height, width), dtype=bool)
        bits[v0:v1, u0:u1] = True
        return BinaryMask(bits=bits)

    @staticmethod
    def vertical_band(width: int, height: int, u0: int, u1: int) -> BinaryMask:
        return MaskFactory.rect(width, height, u0, 0, u1, height)

    @staticmethod
    def image(
        width: int = 40,
        height: int = 30,
        value: int = 128,
        channels: int = 1,
        timestamp: Optional[float] = None,
    ) -> RasterImage:
        shape = (height, width) if channels == 1 else (height, width, channels)
        return RasterImage(
            pixels=np.full(shape, value, dtype=np.uint8), timestamp=timestamp
        )


@pytest.fixture
def cloud_factory():
    return CloudFactory


@pytest.fixture
def mask_factory():
    return MaskFactory


@pytest.fixture
def camera() -> CameraModel:
    return CameraModel(fx=100.0, fy=100.0, cx=40.0, cy=30.0, width=80, height=60)


@pytest.fixture
def identity_pose() -> RigidPose:
    return RigidPose()


@pytest.fixture
def pose_factory() -> Callable[..., RigidPose]:
    def _create(
        rotvec=(0.0, 0.0, 0.0),
        translation=(0.0, 0.0, 0.0),
        timestamp: Optional[float] = None,
    ) -> RigidPose:
        return RigidPose.from_rotvec(rotvec, translation, timestamp=timestamp)

    return _create


@pytest.fixture
def looking_down() -> Callable[[float], RigidPose]:
    """Camera-to-world pose of a camera above the origin looking down -z."""

    def _create(height: float = 1.0, x: float = 0.0, y: float = 0.0) -> RigidPose:
        return RigidPose.look_at((x, y, height), (x, y, 0.0), up=(0.0, 1.0, 0.0))

    return _create


@pytest.fixture(scope="session")
def small_scene_spec() -> SceneSpec:
    """Default scene rendered with a small camera so tests stay fast."""
    return SceneSpec(
        name="small",
        seed=11,
        surface={"size": (0.6, 0.4), "spacing": 0.004},
        camera=CameraModel(
            fx=600.0, fy=600.0, cx=79.5, cy=59.5, width=160, height=120
        ),
    )


@pytest.fixture(scope="session")
def small_scene(small_scene_spec) -> SyntheticScene:
    return generate_scene(small_scene_spec)


@pytest.fixture(scope="session")
def scene_dir(tmp_path_factory, small_scene) -> SceneLayout:
    """The small scene written to disk once per session."""
    return write_scene(small_scene, tmp_path_factory.mktemp("scene"))
