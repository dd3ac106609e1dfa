from dataclasses import dataclass
from typing import Callable

import numpy as np
import pytest

from crackscan.fusion.visibility import hpr_visible

pytestmark = [pytest.mark.integration]

POINTS = 60_000


def _sphere(rng, n, radius=0.5) -> np.ndarray:
    unit = rng.normal(size=(n, 3))
    return radius * unit / np.linalg.norm(unit, axis=1, keepdims=True)


def _box(rng, n, half=0.5) -> np.ndarray:
    pts = rng.uniform(-half, half, size=(n, 3))
    axis = rng.integers(0, 3, size=n)
    pts[np.arange(n), axis] = rng.choice([-half, half], size=n)
    return pts


def _capped_cylinder(rng, n, radius=0.4, half=0.5) -> np.ndarray:
    side = 2.0 * np.pi * radius * 2.0 * half
    caps = 2.0 * np.pi * radius**2
    on_side = rng.uniform(size=n) < side / (side + caps)
    angle = rng.uniform(0.0, 2.0 * np.pi, size=n)
    r = np.where(on_side, radius, radius * np.sqrt(rng.uniform(size=n)))
    z = np.where(
        on_side, rng.uniform(-half, half, size=n), rng.choice([-half, half], size=n)
    )
    return np.column_stack([r * np.cos(angle), r * np.sin(angle), z])


def _slab_entry(origin, direction, lo, hi) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        t1 = (lo - origin) / direction
        t2 = (hi - origin) / direction
    return np.minimum(t1, t2)


def _sphere_hit(origin, direction, radius=0.5) -> np.ndarray:
    b = direction @ origin
    c = origin @ origin - radius**2
    return -b - np.sqrt(np.maximum(b * b - c, 0.0))


def _box_hit(origin, direction, half=0.5) -> np.ndarray:
    return _slab_entry(origin, direction, -half, half).max(axis=1)


def _capped_cylinder_hit(origin, direction, radius=0.4, half=0.5) -> np.ndarray:
    dxy = direction[:, :2]
    oxy = origin[:2]
    a = np.einsum("ij,ij->i", dxy, dxy)
    b = dxy @ oxy
    c = oxy @ oxy - radius**2
    side = (-b - np.sqrt(np.maximum(b * b - a * c, 0.0))) / a
    cap = _slab_entry(origin[2], direction[:, 2], -half, half)
    return np.maximum(side, cap)


def depth_buffer_visible(
    points: np.ndarray, camera: np.ndarray, first_hit: Callable, tol: float = 1e-7
) -> np.ndarray:
    """True where a point is the first surface hit along its viewing ray."""
    rel = points - camera
    depth = np.linalg.norm(rel, axis=1)
    return depth <= first_hit(camera, rel / depth[:, None]) + tol


@dataclass
class ClosedScene:
    name: str
    sample: Callable
    first_hit: Callable
    camera: tuple[float, float, float]


SCENES = [
    ClosedScene("Sphere", _sphere, _sphere_hit, (0.3, -0.4, 3.0)),
    ClosedScene("Box", _box, _box_hit, (2.0, 1.5, 2.5)),
    ClosedScene(
        "CappedCylinder", _capped_cylinder, _capped_cylinder_hit, (2.5, 0.5, 1.5)
    ),
]


class TestHiddenPointRemovalAgainstDepthBuffer:
    @pytest.mark.parametrize("scene", SCENES, ids=[s.name for s in SCENES])
    def test_agrees_with_depth_buffer(self, scene: ClosedScene):
        """Should agree with the depth buffer on at least 95% of the points."""
        rng = np.random.default_rng(len(scene.name))
        points = scene.sample(rng, POINTS)
        camera = np.array(scene.camera)

        visible = np.zeros(POINTS, dtype=bool)
        visible[hpr_visible(points, camera)] = True

        expected = depth_buffer_visible(points, camera, scene.first_hit)
        assert 0.2 < expected.mean() < 0.8
        assert np.mean(visible == expected) >= 0.95
