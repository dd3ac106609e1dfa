"""Unit-quaternion helpers.

Quaternions are length-4 arrays ``[w, x, y, z]`` (scalar first). Composition
uses the Hamilton product, so ``to_matrix(multiply(a, b)) ==
to_matrix(a) @ to_matrix(b)``.
"""

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.spatial.transform import Rotation

Quat = NDArray[np.float64]

IDENTITY: tuple[float, float, float, float] = (1.0, 0.0, 0.0, 0.0)


def normalize(q: ArrayLike, eps: float = 1e-12) -> Quat:
    """Normalize ``q`` and enforce the canonical sign ``w >= 0``."""
    q = np.asarray(q, dtype=np.float64)
    if q.shape != (4,):
        raise ValueError("Quaternion must have length 4")
    if not np.all(np.isfinite(q)):
        raise ValueError("Quaternion components must be finite")
    norm = float(np.sqrt(np.dot(q, q)))
    if norm < eps:
        raise ValueError("Quaternion norm is zero")
    qn = q / norm
    if qn[0] < 0.0:
        qn = -qn
    return qn


def conjugate(q: ArrayLike) -> Quat:
    w, x, y, z = np.asarray(q, dtype=np.float64)
    return np.array([w, -x, -y, -z])


def multiply(q_left: ArrayLike, q_right: ArrayLike) -> Quat:
    w1, x1, y1, z1 = np.asarray(q_left, dtype=np.float64)
    w2, x2, y2, z2 = np.asarray(q_right, dtype=np.float64)
    return np.array(
        [
            w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
            w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
            w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
            w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
        ]
    )


def to_matrix(q: ArrayLike) -> NDArray[np.float64]:
    w, x, y, z = np.asarray(q, dtype=np.float64)
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ]
    )


def from_matrix(matrix: ArrayLike) -> Quat:
    x, y, z, w = Rotation.from_matrix(np.asarray(matrix, dtype=np.float64)).as_quat()
    return normalize([w, x, y, z])


def from_rotvec(rotvec: ArrayLike) -> Quat:
    x, y, z, w = Rotation.from_rotvec(np.asarray(rotvec, dtype=np.float64)).as_quat()
    return normalize([w, x, y, z])


def to_rotvec(q: ArrayLike) -> NDArray[np.float64]:
    w, x, y, z = np.asarray(q, dtype=np.float64)
    return Rotation.from_quat([x, y, z, w]).as_rotvec()


def angle_between(q0: ArrayLike, q1: ArrayLike) -> float:
    """Rotation angle (radians) of the relative rotation ``q0^-1 * q1``."""
    rel = multiply(conjugate(q0), q1)
    return float(2.0 * np.arctan2(np.linalg.norm(rel[1:]), abs(rel[0])))


def arc_angle(q0: ArrayLike, q1: ArrayLike) -> float:
    """Angle between two unit quaternions viewed as points on the 3-sphere."""
    a = np.asarray(q0, dtype=np.float64)
    b = np.asarray(q1, dtype=np.float64)
    return float(2.0 * np.arctan2(np.linalg.norm(a - b), np.linalg.norm(a + b)))
