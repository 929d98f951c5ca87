"""Scene composition: shells dropped with random poses onto a flat seabed.

Instance scale is specified as the percent of image width the instance's
largest projected dimension should occupy when resting on the ground,
which is how the ablation grid's scale buckets are defined. Anti-clumping
uses ground-projected bounding circles with a configurable allowed
overlap fraction; placement is rejection sampling with a bounded attempt
budget and a documented draw order, so scenes are pure functions of their
seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .camera import Camera, quat_from_yaw_pitch_roll, quat_rotate
from .mesh import ShellMesh
from .rng import Rng

MAX_PLACEMENT_ATTEMPTS = 100


@dataclass(frozen=True)
class Rect:
    x0: float
    y0: float
    x1: float
    y1: float

    def __post_init__(self):
        if self.x1 < self.x0 or self.y1 < self.y0:
            raise ValueError("rectangle corners out of order")

    @classmethod
    def centered(cls, width: float, height: float) -> "Rect":
        return cls(-width / 2.0, -height / 2.0, width / 2.0, height / 2.0)

    def contains(self, x: float, y: float) -> bool:
        return self.x0 <= x <= self.x1 and self.y0 <= y <= self.y1


@dataclass(frozen=True)
class InstancePose:
    translation: np.ndarray     # (3,) world units
    rotation: np.ndarray        # (4,) unit quaternion (w, x, y, z)
    uniform_scale: float
    instance_id: int

    def __post_init__(self):
        if self.uniform_scale <= 0:
            raise ValueError("uniform_scale must be > 0")
        if self.instance_id < 0:
            raise ValueError("instance_id must be >= 0")
        q = np.asarray(self.rotation, dtype=float)
        if abs(float(np.linalg.norm(q)) - 1.0) > 1e-9:
            raise ValueError("rotation quaternion must be unit length")
        object.__setattr__(self, "translation", np.asarray(self.translation, dtype=float))
        object.__setattr__(self, "rotation", q)


_DEG15 = math.radians(15.0)


@dataclass(frozen=True)
class SceneParams:
    instance_count: int = 25
    scale_percent_range: tuple[float, float] = (25.0, 30.0)
    yaw_range: tuple[float, float] = (0.0, 2.0 * math.pi)
    pitch_range: tuple[float, float] = (-_DEG15, _DEG15)
    roll_range: tuple[float, float] = (-_DEG15, _DEG15)
    max_overlap_fraction: float = 0.5
    extent: Rect = Rect(-1000.0, -1000.0, 1000.0, 1000.0)
    ground_z: float = 0.0

    def __post_init__(self):
        if self.instance_count < 1:
            raise ValueError("instance_count must be >= 1")
        lo, hi = self.scale_percent_range
        if not (0.0 < lo <= hi <= 100.0):
            raise ValueError("scale_percent_range must lie in (0, 100]")
        if not 0.0 <= self.max_overlap_fraction <= 1.0:
            raise ValueError("max_overlap_fraction must be in [0, 1]")


@dataclass(frozen=True)
class PlacedInstance:
    mesh_index: int
    pose: InstancePose


@dataclass(frozen=True)
class Scene:
    ground_z: float
    extent: Rect
    seed: int
    meshes: tuple[ShellMesh, ...]
    instances: tuple[PlacedInstance, ...]
    # ids placed best-effort after the attempt budget ran out
    best_effort_ids: tuple[int, ...] = ()

    def world_vertices(self, instance: PlacedInstance) -> np.ndarray:
        mesh = self.meshes[instance.mesh_index]
        return transform_vertices(mesh.vertices, instance.pose)


def transform_vertices(vertices: np.ndarray, pose: InstancePose) -> np.ndarray:
    return quat_rotate(pose.rotation, vertices) * pose.uniform_scale + pose.translation


def _convex_hull(points: np.ndarray) -> np.ndarray:
    """Monotone-chain hull of (N, 2) points, counterclockwise."""
    pts = np.unique(points, axis=0)
    if pts.shape[0] <= 2:
        return pts

    def half(iterable):
        chain: list[np.ndarray] = []
        for p in iterable:
            while len(chain) >= 2:
                o, a = chain[-2], chain[-1]
                if (a[0] - o[0]) * (p[1] - o[1]) - (a[1] - o[1]) * (p[0] - o[0]) <= 0:
                    chain.pop()
                else:
                    break
            chain.append(p)
        return chain

    lower = half(pts)
    upper = half(pts[::-1])
    return np.array(lower[:-1] + upper[:-1])


def xy_diameter(points: np.ndarray) -> float:
    """Largest pairwise distance of points projected to the xy plane."""
    hull = _convex_hull(np.asarray(points, dtype=float)[:, :2])
    if hull.shape[0] < 2:
        return 0.0
    diff = hull[:, None, :] - hull[None, :, :]
    return float(np.sqrt((diff ** 2).sum(axis=2)).max())


def _ground_depth_on_axis(camera: Camera, ground_z: float) -> float:
    fwd = camera.forward()
    if fwd[2] == 0.0:
        raise ValueError("camera optical axis is parallel to the ground plane")
    t = (ground_z - float(camera.position[2])) / float(fwd[2])
    if t <= 0:
        raise ValueError("camera does not face the ground plane")
    return t


def scale_for_percent(percent: float, camera: Camera, mesh: ShellMesh,
                      ground_z: float, diameter: float | None = None) -> float:
    """Uniform scale making the mesh's largest dimension project to
    `percent` of the image width at ground depth."""
    if diameter is None:
        diameter = xy_diameter(mesh.vertices)
    if diameter <= 0:
        raise ValueError("mesh has no xy extent")
    depth = _ground_depth_on_axis(camera, ground_z)
    return (percent / 100.0) * camera.width * depth / (camera.focal_length_px * diameter)


def sample_pose(rng: Rng, params: SceneParams, camera: Camera, mesh: ShellMesh,
                instance_id: int = 1, diameter: float | None = None) -> InstancePose:
    """Draw one pose. Order: yaw, pitch, roll, scale percent, x, y.

    Yaw is uniform over its full range; pitch and roll tilt the shell off
    the vertical. The translation z is set so the transformed mesh's lowest
    vertex sits exactly on the ground plane.
    """
    if mesh.vertices.shape[0] == 0:
        raise ValueError("empty mesh")
    yaw = rng.uniform(*params.yaw_range)
    pitch = rng.uniform(*params.pitch_range)
    roll = rng.uniform(*params.roll_range)
    percent = rng.uniform(*params.scale_percent_range)
    tx = rng.uniform(params.extent.x0, params.extent.x1)
    ty = rng.uniform(params.extent.y0, params.extent.y1)

    scale = scale_for_percent(percent, camera, mesh, params.ground_z, diameter)
    q = quat_from_yaw_pitch_roll(yaw, pitch, roll)
    rotated = quat_rotate(q, mesh.vertices) * scale
    tz = params.ground_z - float(rotated[:, 2].min())
    return InstancePose(
        translation=np.array([tx, ty, tz]),
        rotation=q,
        uniform_scale=scale,
        instance_id=instance_id,
    )


def _footprint_circle(vertices: np.ndarray, pose: InstancePose) -> tuple[np.ndarray, float]:
    world = transform_vertices(vertices, pose)[:, :2]
    center = 0.5 * (world.min(axis=0) + world.max(axis=0))
    radius = float(np.linalg.norm(world - center, axis=1).max())
    return center, radius


def circle_overlap_fraction(c1, r1: float, c2, r2: float) -> float:
    """Intersection area of two discs over the area of the smaller one."""
    if r1 <= 0 or r2 <= 0:
        return 0.0
    d = float(np.linalg.norm(np.asarray(c1, dtype=float) - np.asarray(c2, dtype=float)))
    if d >= r1 + r2:
        return 0.0
    rmin = min(r1, r2)
    if d <= abs(r1 - r2):
        return 1.0
    a1 = r1 * r1 * math.acos(max(-1.0, min(1.0, (d * d + r1 * r1 - r2 * r2) / (2 * d * r1))))
    a2 = r2 * r2 * math.acos(max(-1.0, min(1.0, (d * d + r2 * r2 - r1 * r1) / (2 * d * r2))))
    k = 0.5 * math.sqrt(max(0.0, (-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2)))
    return (a1 + a2 - k) / (math.pi * rmin * rmin)


def compose_scene(meshes: list[ShellMesh], params: SceneParams, camera: Camera,
                  seed: int) -> Scene:
    """Place instances one by one with rejection sampling.

    Per instance: pick a mesh uniformly, then draw poses until the
    footprint-circle overlap against every accepted instance stays within
    ``params.max_overlap_fraction``, giving up after 100 attempts and
    keeping the least-overlapping pose seen (flagged in
    ``best_effort_ids``). Fully determined by ``seed``.
    """
    if not meshes:
        raise ValueError("need at least one mesh")
    rng = Rng(seed)
    diameters = [xy_diameter(m.vertices) for m in meshes]
    placed: list[PlacedInstance] = []
    circles: list[tuple[np.ndarray, float]] = []
    forced: list[int] = []

    for instance_id in range(1, params.instance_count + 1):
        mesh_index = rng.randint(0, len(meshes) - 1)
        mesh = meshes[mesh_index]
        best: tuple[float, InstancePose, tuple[np.ndarray, float]] | None = None
        accepted = False
        for _ in range(MAX_PLACEMENT_ATTEMPTS):
            pose = sample_pose(rng, params, camera, mesh, instance_id, diameters[mesh_index])
            circle = _footprint_circle(mesh.vertices, pose)
            worst = max(
                (circle_overlap_fraction(circle[0], circle[1], c, r) for c, r in circles),
                default=0.0,
            )
            if best is None or worst < best[0]:
                best = (worst, pose, circle)
            if worst <= params.max_overlap_fraction:
                accepted = True
                break
        assert best is not None
        if not accepted:
            forced.append(instance_id)
        placed.append(PlacedInstance(mesh_index=mesh_index, pose=best[1]))
        circles.append(best[2])

    return Scene(
        ground_z=params.ground_z,
        extent=params.extent,
        seed=seed,
        meshes=tuple(meshes),
        instances=tuple(placed),
        best_effort_ids=tuple(forced),
    )
