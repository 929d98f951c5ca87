"""Pinhole camera and quaternion pose math.

Camera frame: x right, y down (image rows grow downward), z forward.
``orientation`` is the camera-to-world rotation as a unit quaternion
(w, x, y, z); the default top-down camera is a half-turn about x, which
points the optical axis along world -z.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

BEHIND_EPS = 1e-6


def quat_normalize(q) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    n = float(np.linalg.norm(q))
    if n == 0.0:
        raise ValueError("zero quaternion")
    return q / n


def quat_mul(a, b) -> np.ndarray:
    aw, ax, ay, az = a
    bw, bx, by, bz = b
    return np.array([
        aw * bw - ax * bx - ay * by - az * bz,
        aw * bx + ax * bw + ay * bz - az * by,
        aw * by - ax * bz + ay * bw + az * bx,
        aw * bz + ax * by - ay * bx + az * bw,
    ])


def quat_from_axis_angle(axis, angle: float) -> np.ndarray:
    axis = np.asarray(axis, dtype=float)
    axis = axis / np.linalg.norm(axis)
    half = 0.5 * angle
    return np.concatenate([[math.cos(half)], math.sin(half) * axis])


def quat_from_yaw_pitch_roll(yaw: float, pitch: float, roll: float) -> np.ndarray:
    """Compose Rz(yaw) * Ry(pitch) * Rx(roll)."""
    qz = quat_from_axis_angle((0.0, 0.0, 1.0), yaw)
    qy = quat_from_axis_angle((0.0, 1.0, 0.0), pitch)
    qx = quat_from_axis_angle((1.0, 0.0, 0.0), roll)
    return quat_mul(quat_mul(qz, qy), qx)


def quat_to_matrix(q) -> np.ndarray:
    w, x, y, z = quat_normalize(q)
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
        [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
        [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
    ])


def quat_rotate(q, points: np.ndarray) -> np.ndarray:
    """Rotate (N, 3) points (or a single point) by a unit quaternion."""
    m = quat_to_matrix(q)
    pts = np.asarray(points, dtype=float)
    return pts @ m.T


# Half-turn about x: camera looks along world -z, image x tracks world +x.
TOP_DOWN_ORIENTATION = np.array([0.0, 1.0, 0.0, 0.0])


@dataclass(frozen=True)
class Camera:
    position: np.ndarray            # (3,) world units
    orientation: np.ndarray         # (4,) unit quaternion, camera-to-world
    focal_length_px: float
    principal_point: tuple[float, float]
    width: int
    height: int

    def __post_init__(self):
        if self.focal_length_px <= 0:
            raise ValueError("focal_length_px must be > 0")
        if self.width < 1 or self.height < 1:
            raise ValueError("image dimensions must be >= 1")
        object.__setattr__(self, "position", np.asarray(self.position, dtype=float))
        object.__setattr__(self, "orientation", quat_normalize(self.orientation))

    @classmethod
    def top_down(cls, extent_x: float, extent_y: float, width: int, height: int,
                 altitude: float | None = None, ground_z: float = 0.0,
                 margin: float = 1.05) -> "Camera":
        """Camera straight above the origin, framing an extent_x-by-extent_y
        ground rectangle with the given margin."""
        if altitude is None:
            altitude = 2.0 * max(extent_x, extent_y)
        f = altitude * min(width / extent_x, height / extent_y) / margin
        return cls(
            position=np.array([0.0, 0.0, ground_z + altitude]),
            orientation=TOP_DOWN_ORIENTATION.copy(),
            focal_length_px=f,
            principal_point=(width / 2.0, height / 2.0),
            width=width,
            height=height,
        )

    def world_to_camera(self, points: np.ndarray) -> np.ndarray:
        m = quat_to_matrix(self.orientation)
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return (pts - self.position) @ m

    def forward(self) -> np.ndarray:
        """Optical axis direction in world coordinates."""
        return quat_to_matrix(self.orientation) @ np.array([0.0, 0.0, 1.0])


def project(camera: Camera, point) -> tuple[float, float, float] | None:
    """Pinhole projection of one world point to (px, py, depth).

    Depth is the camera-frame z. Points with depth <= 1e-6 are behind the
    camera (or numerically at it) and yield None.
    """
    cam = camera.world_to_camera(point)[0]
    z = float(cam[2])
    if z <= BEHIND_EPS:
        return None
    f = camera.focal_length_px
    cx, cy = camera.principal_point
    return (f * float(cam[0]) / z + cx, f * float(cam[1]) / z + cy, z)


def project_many(camera: Camera, points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized projection: returns ((N, 2) pixel coords, (N,) depths).

    Behind-camera points get non-finite pixel coords; callers must filter
    on depth before using them.
    """
    cam = camera.world_to_camera(points)
    z = cam[:, 2]
    f = camera.focal_length_px
    cx, cy = camera.principal_point
    with np.errstate(divide="ignore", invalid="ignore"):
        px = np.where(z > BEHIND_EPS, f * cam[:, 0] / z + cx, np.nan)
        py = np.where(z > BEHIND_EPS, f * cam[:, 1] / z + cy, np.nan)
    return np.column_stack([px, py]), z
