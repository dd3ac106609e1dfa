"""Analytic surfaces: point sampling and ray intersection.

Surface coordinates ``(s, w)`` are isometric on the crack-bearing face and
span ``[0, size[0]] x [0, size[1]]``.
"""

from abc import ABC, abstractmethod
from typing import NamedTuple

import numpy as np

from ..exceptions import InvalidSpec
from .schemas import SurfaceSpec


class SurfaceSamples(NamedTuple):
    points: np.ndarray
    normals: np.ndarray
    coords: np.ndarray
    on_crack_face: np.ndarray


class RayHits(NamedTuple):
    hit: np.ndarray
    t: np.ndarray
    points: np.ndarray
    coords: np.ndarray
    on_crack_face: np.ndarray


def _axis(length: float, spacing: float) -> np.ndarray:
    return spacing * np.arange(int(np.floor(length / spacing + 1e-9)) + 1)


def _empty_hits(n: int) -> RayHits:
    return RayHits(
        hit=np.zeros(n, dtype=bool),
        t=np.full(n, np.inf),
        points=np.full((n, 3), np.nan),
        coords=np.full((n, 2), np.nan),
        on_crack_face=np.zeros(n, dtype=bool),
    )


class Surface(ABC):
    def __init__(self, spec: SurfaceSpec):
        self.spec = spec
        self.width, self.height = spec.size

    @abstractmethod
    def sample(self) -> SurfaceSamples:
        """Points on a regular grid of ``spec.spacing``."""

    @abstractmethod
    def intersect(self, origins: np.ndarray, directions: np.ndarray) -> RayHits:
        """Nearest intersection in front of each ray origin."""

    @abstractmethod
    def frame_at(self, s: float, w: float) -> tuple[np.ndarray, np.ndarray]:
        """World point and unit normal at surface coordinates ``(s, w)``."""

    def tangent_at(self, s: float, w: float, ds: float, dw: float) -> np.ndarray:
        """World direction of the surface-coordinate direction ``(ds, dw)``."""
        eps = 1e-6
        p0, _ = self.frame_at(s, w)
        p1, _ = self.frame_at(s + eps * ds, w + eps * dw)
        d = p1 - p0
        return d / np.linalg.norm(d)


class PlaneSurface(Surface):
    def sample(self) -> SurfaceSamples:
        xs = _axis(self.width, self.spec.spacing)
        ys = _axis(self.height, self.spec.spacing)
        gx, gy = np.meshgrid(xs, ys, indexing="ij")
        pts = np.column_stack([gx.ravel(), gy.ravel(), np.zeros(gx.size)])
        normals = np.tile([0.0, 0.0, 1.0], (len(pts), 1))
        return SurfaceSamples(pts, normals, pts[:, :2].copy(), np.ones(len(pts), bool))

    def intersect(self, origins: np.ndarray, directions: np.ndarray) -> RayHits:
        out = _empty_hits(len(origins))
        dz = directions[:, 2]
        ok = np.abs(dz) > 1e-15
        t = np.full(len(origins), np.inf)
        t[ok] = -origins[ok, 2] / dz[ok]
        p = origins + np.where(np.isfinite(t), t, 0.0)[:, None] * directions
        inside = (
            ok
            & (t > 0)
            & (p[:, 0] >= 0)
            & (p[:, 0] <= self.width)
            & (p[:, 1] >= 0)
            & (p[:, 1] <= self.height)
        )
        out.hit[:] = inside
        out.t[inside] = t[inside]
        out.points[inside] = p[inside]
        out.coords[inside] = p[inside, :2]
        out.on_crack_face[:] = inside
        return out

    def frame_at(self, s: float, w: float) -> tuple[np.ndarray, np.ndarray]:
        return np.array([s, w, 0.0]), np.array([0.0, 0.0, 1.0])


class BoxSurface(PlaneSurface):
    """Closed box ``[0, W] x [0, H] x [-depth, 0]``; cracks lie on the top
    face."""

    def sample(self) -> SurfaceSamples:
        sp, d = self.spec.spacing, self.spec.depth
        xs, ys = _axis(self.width, sp), _axis(self.height, sp)
        zs = -_axis(d, sp)
        zs_inner = zs[(zs < 0) & (zs > -d)]
        xs_inner = xs[(xs > 0) & (xs < self.width)]

        faces = []
        for z, nz in ((0.0, 1.0), (-d, -1.0)):
            gx, gy = np.meshgrid(xs, ys, indexing="ij")
            faces.append(
                (
                    np.column_stack([gx.ravel(), gy.ravel(), np.full(gx.size, z)]),
                    (0.0, 0.0, nz),
                )
            )
        for x, nx in ((0.0, -1.0), (self.width, 1.0)):
            gy, gz = np.meshgrid(ys, zs_inner, indexing="ij")
            faces.append(
                (
                    np.column_stack([np.full(gy.size, x), gy.ravel(), gz.ravel()]),
                    (nx, 0.0, 0.0),
                )
            )
        for y, ny in ((0.0, -1.0), (self.height, 1.0)):
            gx, gz = np.meshgrid(xs_inner, zs_inner, indexing="ij")
            faces.append(
                (
                    np.column_stack([gx.ravel(), np.full(gx.size, y), gz.ravel()]),
                    (0.0, ny, 0.0),
                )
            )

        pts = np.vstack([f for f, _ in faces])
        normals = np.vstack([np.tile(n, (len(f), 1)) for f, n in faces])
        top = np.zeros(len(pts), dtype=bool)
        top[: len(faces[0][0])] = True
        return SurfaceSamples(pts, normals, pts[:, :2].copy(), top)

    def intersect(self, origins: np.ndarray, directions: np.ndarray) -> RayHits:
        out = _empty_hits(len(origins))
        lo = np.array([0.0, 0.0, -self.spec.depth])
        hi = np.array([self.width, self.height, 0.0])
        with np.errstate(divide="ignore", invalid="ignore"):
            inv = 1.0 / directions
            t1 = (lo - origins) * inv
            t2 = (hi - origins) * inv
        t1 = np.where(np.isnan(t1), -np.inf, t1)
        t2 = np.where(np.isnan(t2), np.inf, t2)
        t_near = np.minimum(t1, t2)
        t_far = np.maximum(t1, t2)
        entry = t_near.max(axis=1)
        exit_ = t_far.min(axis=1)
        hit = (entry <= exit_) & (entry > 0)

        p = origins + np.where(hit, entry, 0.0)[:, None] * directions
        entry_axis = t_near.argmax(axis=1)
        top = hit & (entry_axis == 2) & (directions[:, 2] < 0)
        out.hit[:] = hit
        out.t[hit] = entry[hit]
        out.points[hit] = p[hit]
        out.coords[top] = p[top, :2]
        out.on_crack_face[:] = top
        return out


class CylinderSurface(Surface):
    """Arc of a cylinder of radius R with its axis along x.

    Surface coordinate ``w`` is arc length; the arc is centered on the top
    line ``y = 0, z = 0`` and the axis lies at ``z = -R``.
    """

    def _phi(self, w):
        return (np.asarray(w) - self.height / 2.0) / self.spec.radius

    def sample(self) -> SurfaceSamples:
        r = self.spec.radius
        ss = _axis(self.width, self.spec.spacing)
        ws = _axis(self.height, self.spec.spacing)
        gs, gw = np.meshgrid(ss, ws, indexing="ij")
        phi = self._phi(gw.ravel())
        normals = np.column_stack([np.zeros(phi.size), np.sin(phi), np.cos(phi)])
        pts = np.column_stack([gs.ravel(), r * normals[:, 1], r * normals[:, 2] - r])
        coords = np.column_stack([gs.ravel(), gw.ravel()])
        return SurfaceSamples(pts, normals, coords, np.ones(len(pts), bool))

    def intersect(self, origins: np.ndarray, directions: np.ndarray) -> RayHits:
        out = _empty_hits(len(origins))
        r = self.spec.radius
        oy, oz = origins[:, 1], origins[:, 2] + r
        dy, dz = directions[:, 1], directions[:, 2]
        a = dy**2 + dz**2
        b = 2.0 * (oy * dy + oz * dz)
        c = oy**2 + oz**2 - r**2
        disc = b**2 - 4.0 * a * c
        ok = (a > 1e-15) & (disc >= 0)
        sq = np.sqrt(np.where(ok, disc, 0.0))
        safe_a = np.where(ok, a, 1.0)
        half_arc = self.height / (2.0 * r)

        # near root first, then the far one
        for root in ((-b - sq) / (2.0 * safe_a), (-b + sq) / (2.0 * safe_a)):
            todo = ok & ~out.hit & (root > 0)
            p = origins + np.where(todo, root, 0.0)[:, None] * directions
            phi = np.arctan2(p[:, 1], p[:, 2] + r)
            valid = (
                todo
                & (p[:, 0] >= 0)
                & (p[:, 0] <= self.width)
                & (np.abs(phi) <= half_arc)
            )
            out.hit[valid] = True
            out.t[valid] = root[valid]
            out.points[valid] = p[valid]
            out.coords[valid, 0] = p[valid, 0]
            out.coords[valid, 1] = r * phi[valid] + self.height / 2.0
            out.on_crack_face[valid] = True
        return out

    def frame_at(self, s: float, w: float) -> tuple[np.ndarray, np.ndarray]:
        r = self.spec.radius
        phi = float(self._phi(w))
        normal = np.array([0.0, np.sin(phi), np.cos(phi)])
        return np.array([s, r * normal[1], r * normal[2] - r]), normal


_SURFACES: dict[str, type[Surface]] = {
    "plane": PlaneSurface,
    "box": BoxSurface,
    "cylinder": CylinderSurface,
}


def make_surface(spec: SurfaceSpec) -> Surface:
    try:
        return _SURFACES[spec.kind](spec)
    except KeyError:
        raise InvalidSpec(f"Unknown surface kind '{spec.kind}'.") from None
