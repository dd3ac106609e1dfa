import logging

import numpy as np
from numpy.typing import ArrayLike

from ..exceptions import (
    DegenerateJoint,
    EmptyHistogram,
    NoVisiblePoints,
    ValidationError,
)
from ..formats.schemas import PointCloud, RasterImage
from ..geometry.operations import project_points, transform_points
from ..geometry.schemas import CameraModel, RigidPose
from .schemas import JointHistogram

log = logging.getLogger(__name__)

DEFAULT_BINS = 32


def bilinear_sample(gray: np.ndarray, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Sample ``gray`` at continuous pixel positions.

    Positions must satisfy ``0 <= u <= W-1`` and ``0 <= v <= H-1``.
    """
    h, w = gray.shape
    img = gray.astype(np.float64)
    u0 = np.clip(np.floor(u).astype(np.int64), 0, max(w - 2, 0))
    v0 = np.clip(np.floor(v).astype(np.int64), 0, max(h - 2, 0))
    u1 = np.minimum(u0 + 1, w - 1)
    v1 = np.minimum(v0 + 1, h - 1)
    fu = u - u0
    fv = v - v0
    top = img[v0, u0] * (1.0 - fu) + img[v0, u1] * fu
    bottom = img[v1, u0] * (1.0 - fu) + img[v1, u1] * fu
    return top * (1.0 - fv) + bottom * fv


def build_histograms(
    cloud: PointCloud,
    image: RasterImage,
    cam: CameraModel,
    extrinsic: RigidPose,
    bins: int = DEFAULT_BINS,
) -> JointHistogram:
    """Joint histogram of LiDAR and image intensities for in-frame points,
    using the same frame bound as fusion (``CameraModel.pixel_in_frame``).

    ``extrinsic`` maps cloud coordinates into the camera frame. LiDAR
    intensities are normalized by their maximum and binned as
    ``min(floor(L * B), B - 1)``; image intensities are sampled bilinearly
    and binned as ``floor(I * B / 256)``.
    """
    if cloud.intensity is None:
        raise ValidationError("Calibration needs a cloud with intensity.")
    lidar = cloud.normalized_intensity()
    uv, in_front = project_points(cam, transform_points(extrinsic, cloud.points))
    u, v = uv[:, 0], uv[:, 1]
    inside = in_front.copy()
    inside[in_front] = cam.pixel_in_frame(u[in_front], v[in_front])
    count = int(inside.sum())
    if count == 0:
        raise NoVisiblePoints()

    intensity = bilinear_sample(
        image.gray(),
        np.clip(u[inside], 0.0, image.width - 1),
        np.clip(v[inside], 0.0, image.height - 1),
    )
    lidar_bin = np.minimum(np.floor(lidar[inside] * bins).astype(np.int64), bins - 1)
    image_bin = np.minimum(
        np.floor(intensity * bins / 256.0).astype(np.int64), bins - 1
    )
    joint = np.bincount(lidar_bin * bins + image_bin, minlength=bins * bins)
    log.debug("Histogram built from %d in-frame points", count)
    return JointHistogram.from_joint(joint.reshape(bins, bins))


def entropy(hist: ArrayLike) -> float:
    """Shannon entropy in nats of a count array of any shape."""
    counts = np.asarray(hist, dtype=np.float64).ravel()
    total = counts.sum()
    if total <= 0:
        raise EmptyHistogram()
    p = counts[counts > 0] / total
    return float(-np.sum(p * np.log(p)))


def mutual_information(hist: JointHistogram) -> float:
    return (
        entropy(hist.marginal_lidar)
        + entropy(hist.marginal_image)
        - entropy(hist.bins)
    )


def nid(hist: JointHistogram) -> float:
    """Normalized information distance ``(H(L,I) - MI) / H(L,I)`` in [0, 1]."""
    h_joint = entropy(hist.bins)
    if h_joint == 0.0:
        raise DegenerateJoint()
    mi = entropy(hist.marginal_lidar) + entropy(hist.marginal_image) - h_joint
    return float(min(max((h_joint - mi) / h_joint, 0.0), 1.0))
