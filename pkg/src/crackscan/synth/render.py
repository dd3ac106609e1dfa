"""Ray-cast rendering of the textured surface and its crack mask."""

import numpy as np

from ..formats.schemas import BinaryMask, RasterImage
from ..geometry.schemas import CameraModel, RigidPose
from .bands import CrackBand, crack_mask
from .surfaces import RayHits, Surface
from .texture import ValueNoise, albedo, to_gray

BACKGROUND = 0


def pixel_rays(
    cam: CameraModel, camera_pose: RigidPose
) -> tuple[np.ndarray, np.ndarray]:
    """World origins and unit directions of the rays through every pixel
    center, row-major."""
    v, u = np.mgrid[0 : cam.height, 0 : cam.width]
    d_cam = np.column_stack(
        [
            (u.ravel() - cam.cx) / cam.fx,
            (v.ravel() - cam.cy) / cam.fy,
            np.ones(u.size),
        ]
    )
    d_world = d_cam @ camera_pose.rotation_matrix().T
    d_world /= np.linalg.norm(d_world, axis=1, keepdims=True)
    origins = np.tile(camera_pose.translation_array, (len(d_world), 1))
    return origins, d_world


def cast(
    surface: Surface, cam: CameraModel, camera_pose: RigidPose
) -> RayHits:
    origins, dirs = pixel_rays(cam, camera_pose)
    return surface.intersect(origins, dirs)


def render_view(
    surface: Surface,
    bands: list[CrackBand],
    texture: ValueNoise,
    cam: CameraModel,
    camera_pose: RigidPose,
    timestamp: float | None = None,
) -> tuple[RasterImage, BinaryMask]:
    """Render the RGB image and the exact crack mask seen by one camera.

    A pixel is crack exactly when the surface point under its center lies
    in a crack band on the crack-bearing face.
    """
    hits = cast(surface, cam, camera_pose)
    on_crack = hits.on_crack_face & crack_mask(bands, hits.coords)

    gray = np.full(len(hits.hit), BACKGROUND, dtype=np.uint8)
    if np.any(hits.hit):
        gray[hits.hit] = to_gray(
            albedo(texture, hits.points[hits.hit], on_crack[hits.hit])
        )
    pixels = np.repeat(gray.reshape(cam.height, cam.width, 1), 3, axis=2)
    mask = BinaryMask(bits=on_crack.reshape(cam.height, cam.width))
    return RasterImage(pixels=pixels, timestamp=timestamp), mask
