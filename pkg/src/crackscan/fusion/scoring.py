import numpy as np
from numpy.typing import ArrayLike, NDArray

from ..exceptions import DegeneratePoint, ValidationError
from ..geometry.schemas import RigidPose


def orientation_scores(
    points: ArrayLike, camera_pose: RigidPose
) -> NDArray[np.float64]:
    """Cosine between each camera-to-point direction and the optical axis."""
    rel = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    rel = rel - camera_pose.translation_array
    norms = np.linalg.norm(rel, axis=1)
    if np.any(norms <= 1e-9):
        raise DegeneratePoint()
    return np.clip(rel @ camera_pose.optical_axis / norms, -1.0, 1.0)


def distance_scores(
    points: ArrayLike, camera_position: ArrayLike, ideal_distance: float, sigma: float
) -> NDArray[np.float64]:
    if sigma <= 0:
        raise ValidationError("sigma must be positive.")
    rel = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    d = np.linalg.norm(rel - np.asarray(camera_position, dtype=np.float64), axis=1)
    return np.exp(-((d - ideal_distance) ** 2) / (2.0 * sigma**2))


def score_orientation(point: ArrayLike, camera_pose: RigidPose) -> float:
    return float(orientation_scores(point, camera_pose)[0])


def score_distance(
    point: ArrayLike, camera_position: ArrayLike, ideal_distance: float, sigma: float
) -> float:
    """Gaussian preference for views near ``ideal_distance`` from the point."""
    return float(distance_scores(point, camera_position, ideal_distance, sigma)[0])
