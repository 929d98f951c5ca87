"""Deterministic software rasterizer producing label masks and depth maps.

Vertices are snapped to 1/256-pixel fixed point after projection; edge
functions at pixel centers are then exact 64-bit integers, coverage uses
the top-left fill rule, and depth is the perspective-correct interpolation
of inverse camera z. Visibility resolves by the lexicographic rule
(smaller depth, then smaller instance id, then smaller triangle index),
which is associative, so output is independent of triangle submission
order and of how the image is split across workers.

The ground plane renders analytically (label 0, finite depth); pixels
whose rays miss it keep the +inf background sentinel.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .camera import BEHIND_EPS, Camera, project_many, quat_to_matrix
from .scene import Scene

SUBPIXEL_BITS = 8
SUBPIXEL = 1 << SUBPIXEL_BITS          # fixed-point units per pixel
HALF_PIXEL = SUBPIXEL // 2
GUARD_BAND = 1 << 25                   # |snapped coord| bound keeping int64 exact

DEFAULT_LIGHT = np.array([0.25, -0.35, 0.9]) / np.linalg.norm([0.25, -0.35, 0.9])


@dataclass(frozen=True)
class MaskImage:
    """Per-pixel instance labels (0 = background) with paired depth."""

    labels: np.ndarray  # (H, W) int32
    depth: np.ndarray   # (H, W) float64, +inf where nothing was hit

    def __post_init__(self):
        if self.labels.shape != self.depth.shape or self.labels.ndim != 2:
            raise ValueError("labels and depth must share a 2-D shape")

    @property
    def width(self) -> int:
        return self.labels.shape[1]

    @property
    def height(self) -> int:
        return self.labels.shape[0]


def snap_fixed(coords: np.ndarray) -> np.ndarray:
    """Round pixel coordinates to 1/256-pixel integers (half to even)."""
    clipped = np.clip(coords * SUBPIXEL, -2.0**62, 2.0**62)
    return np.rint(clipped).astype(np.int64)


def _is_top_left(ax: int, ay: int, bx: int, by: int) -> bool:
    # Canonical (positive-area, y-down) winding: top edges run +x, left
    # edges run -y.
    dy = by - ay
    return dy < 0 or (dy == 0 and bx - ax > 0)


def rasterize_triangles_fp(
    xfp: np.ndarray,
    yfp: np.ndarray,
    inv_z: np.ndarray,
    ids: np.ndarray,
    tri_indices: np.ndarray,
    depth: np.ndarray,
    label: np.ndarray,
    tri: np.ndarray,
    row0: int = 0,
    row1: int | None = None,
) -> None:
    """Rasterize snapped triangles into the given buffers, rows [row0, row1).

    ``xfp``/``yfp``/``inv_z`` are (T, 3) per-triangle vertex arrays in
    fixed-point pixel coordinates and inverse camera depth. Degenerate
    (zero snapped area) triangles are skipped; negative-area ones have two
    vertices swapped so all edges use one winding convention. Buffers are
    updated in place under the lexicographic visibility rule.
    """
    height, width = depth.shape
    if row1 is None:
        row1 = height
    xfp = np.asarray(xfp, dtype=np.int64)
    yfp = np.asarray(yfp, dtype=np.int64)
    if xfp.size and max(int(np.abs(xfp).max()), int(np.abs(yfp).max())) > GUARD_BAND:
        raise ValueError("snapped coordinates exceed the rasterizer guard band")

    xs_int = xfp.tolist()
    ys_int = yfp.tolist()
    izs = np.asarray(inv_z, dtype=np.float64).tolist()
    ids_int = np.asarray(ids).tolist()
    tris_int = np.asarray(tri_indices).tolist()
    sx_all = np.arange(width, dtype=np.int64) * SUBPIXEL + HALF_PIXEL
    sy_all = np.arange(height, dtype=np.int64) * SUBPIXEL + HALF_PIXEL

    with np.errstate(divide="ignore"):
        for t in range(len(xs_int)):
            x0, x1, x2 = xs_int[t]
            y0, y1, y2 = ys_int[t]
            iz0, iz1, iz2 = izs[t]
            area2 = (x1 - x0) * (y2 - y0) - (y1 - y0) * (x2 - x0)
            if area2 == 0:
                continue
            if area2 < 0:
                x1, x2 = x2, x1
                y1, y2 = y2, y1
                iz1, iz2 = iz2, iz1
                area2 = -area2

            # Pixel-center bbox: centers live at SUBPIXEL*p + HALF_PIXEL.
            xmin = max(0, -(-(min(x0, x1, x2) - HALF_PIXEL) // SUBPIXEL))
            xmax = min(width - 1, (max(x0, x1, x2) - HALF_PIXEL) // SUBPIXEL)
            ymin = max(row0, -(-(min(y0, y1, y2) - HALF_PIXEL) // SUBPIXEL))
            ymax = min(row1 - 1, (max(y0, y1, y2) - HALF_PIXEL) // SUBPIXEL)
            if xmin > xmax or ymin > ymax:
                continue

            b0 = 0 if _is_top_left(x1, y1, x2, y2) else -1
            b1 = 0 if _is_top_left(x2, y2, x0, y0) else -1
            b2 = 0 if _is_top_left(x0, y0, x1, y1) else -1
            inst = ids_int[t]
            tidx = tris_int[t]
            a2f = float(area2)

            # Tiny triangles dominate; plain integer arithmetic beats numpy
            # dispatch there and computes bit-identical values.
            if (xmax - xmin + 1) * (ymax - ymin + 1) <= 16:
                e01x, e01y = x1 - x0, y1 - y0
                e12x, e12y = x2 - x1, y2 - y1
                e20x, e20y = x0 - x2, y0 - y2
                for py in range(ymin, ymax + 1):
                    sy = py * SUBPIXEL + HALF_PIXEL
                    for px in range(xmin, xmax + 1):
                        sx = px * SUBPIXEL + HALF_PIXEL
                        w0 = e12x * (sy - y1) - e12y * (sx - x1)
                        if w0 + b0 < 0:
                            continue
                        w1 = e20x * (sy - y2) - e20y * (sx - x2)
                        if w1 + b1 < 0:
                            continue
                        w2 = e01x * (sy - y0) - e01y * (sx - x0)
                        if w2 + b2 < 0:
                            continue
                        izc = (float(w0) * iz0 + float(w1) * iz1
                               + float(w2) * iz2) / a2f
                        zc = 1.0 / izc
                        d = depth[py, px]
                        if zc < d or (zc == d and (
                                inst < label[py, px]
                                or (inst == label[py, px] and tidx < tri[py, px]))):
                            depth[py, px] = zc
                            label[py, px] = inst
                            tri[py, px] = tidx
                continue

            sx = sx_all[xmin:xmax + 1][None, :]
            sy = sy_all[ymin:ymax + 1][:, None]
            w0 = (x2 - x1) * (sy - y1) - (y2 - y1) * (sx - x1)
            w1 = (x0 - x2) * (sy - y2) - (y0 - y2) * (sx - x2)
            w2 = (x1 - x0) * (sy - y0) - (y1 - y0) * (sx - x0)
            cover = ((w0 + b0) >= 0) & ((w1 + b1) >= 0) & ((w2 + b2) >= 0)
            if not cover.any():
                continue

            izc = (w0.astype(np.float64) * iz0
                   + w1.astype(np.float64) * iz1
                   + w2.astype(np.float64) * iz2) / a2f
            zc = 1.0 / izc

            dsub = depth[ymin:ymax + 1, xmin:xmax + 1]
            lsub = label[ymin:ymax + 1, xmin:xmax + 1]
            tsub = tri[ymin:ymax + 1, xmin:xmax + 1]
            wins = cover & (
                (zc < dsub)
                | ((zc == dsub) & (inst < lsub))
                | ((zc == dsub) & (inst == lsub) & (tidx < tsub))
            )
            if not wins.any():
                continue
            dsub[wins] = zc[wins]
            lsub[wins] = inst
            tsub[wins] = tidx


def ground_depth_map(camera: Camera, ground_z: float) -> np.ndarray:
    """Camera-frame depth of the ground plane per pixel center; +inf where
    the ray misses the plane."""
    xs = (np.arange(camera.width) + 0.5 - camera.principal_point[0]) / camera.focal_length_px
    ys = (np.arange(camera.height) + 0.5 - camera.principal_point[1]) / camera.focal_length_px
    dir_cam = np.stack(
        [np.broadcast_to(xs[None, :], (camera.height, camera.width)),
         np.broadcast_to(ys[:, None], (camera.height, camera.width)),
         np.ones((camera.height, camera.width))],
        axis=-1,
    )
    m = quat_to_matrix(camera.orientation)
    dz = dir_cam @ m.T[:, 2]
    with np.errstate(divide="ignore", invalid="ignore"):
        t = (ground_z - float(camera.position[2])) / dz
    depth = np.where((np.abs(dz) > 1e-15) & (t > BEHIND_EPS), t, np.inf)
    return depth.astype(np.float64)


def _scene_triangle_arrays(scene: Scene, camera: Camera, cull_backfaces: bool):
    """Project every instance and collect per-triangle vertex arrays.

    Triangles with any vertex at camera depth <= 1e-6 are dropped (there is
    no near-plane clipping); with culling on, triangles whose snapped
    screen winding is not counterclockwise-positive are dropped too, which
    is exact for closed meshes viewed from outside.
    """
    xs, ys, izs, ids, tris, normals = [], [], [], [], [], []
    tri_base = 0
    for inst in scene.instances:
        mesh = scene.meshes[inst.mesh_index]
        world = scene.world_vertices(inst)
        pix, z = project_many(camera, world)
        front = z > BEHIND_EPS
        t = mesh.triangles
        keep = front[t].all(axis=1)
        tri_idx = tri_base + np.arange(t.shape[0], dtype=np.int64)
        tri_base += t.shape[0]
        if not keep.any():
            continue
        t = t[keep]
        tri_idx = tri_idx[keep]
        xfp_v = snap_fixed(np.where(front, pix[:, 0], 0.0))
        yfp_v = snap_fixed(np.where(front, pix[:, 1], 0.0))
        inv_z_v = np.where(front, 1.0 / np.where(front, z, 1.0), 0.0)
        xfp = xfp_v[t]
        yfp = yfp_v[t]
        if cull_backfaces:
            # Image y points down, so outward-CCW faces seen from the camera
            # project to negative snapped area.
            area2 = ((xfp[:, 1] - xfp[:, 0]) * (yfp[:, 2] - yfp[:, 0])
                     - (yfp[:, 1] - yfp[:, 0]) * (xfp[:, 2] - xfp[:, 0]))
            facing = area2 < 0
            if not facing.any():
                continue
            t = t[facing]
            xfp = xfp[facing]
            yfp = yfp[facing]
            tri_idx = tri_idx[facing]
        v = world
        n = np.cross(v[t[:, 1]] - v[t[:, 0]], v[t[:, 2]] - v[t[:, 0]])
        xs.append(xfp)
        ys.append(yfp)
        izs.append(inv_z_v[t])
        ids.append(np.full(t.shape[0], inst.pose.instance_id, dtype=np.int64))
        tris.append(tri_idx)
        normals.append(n)
    if not xs:
        empty = np.zeros((0, 3))
        return (empty.astype(np.int64), empty.astype(np.int64), empty,
                np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64), empty)
    return (np.concatenate(xs), np.concatenate(ys), np.concatenate(izs),
            np.concatenate(ids), np.concatenate(tris), np.concatenate(normals))


def _run_bands(task, height: int, workers: int) -> None:
    if workers <= 1:
        task(0, height)
        return
    bounds = np.linspace(0, height, workers + 1).astype(int)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(task, int(bounds[i]), int(bounds[i + 1]))
                   for i in range(workers) if bounds[i] < bounds[i + 1]]
        for f in futures:
            f.result()


def render_scene(
    scene: Scene,
    camera: Camera,
    light_direction: np.ndarray | None = None,
    workers: int = 1,
    cull_backfaces: bool = False,
) -> tuple[MaskImage, np.ndarray | None]:
    """Rasterize a scene once, returning the mask and (optionally) a
    flat-shaded preview.

    The preview is 8-bit grayscale with per-triangle Lambertian intensity
    ``255 * max(0, n . l)``; the ground plane is shaded the same way and
    sky pixels are 0. Output is identical for any worker count.
    """
    depth = ground_depth_map(camera, scene.ground_z)
    label = np.zeros((camera.height, camera.width), dtype=np.int32)
    tri = np.full((camera.height, camera.width), -1, dtype=np.int64)
    xfp, yfp, izs, ids, tris, normals = _scene_triangle_arrays(scene, camera, cull_backfaces)

    def task(r0: int, r1: int) -> None:
        rasterize_triangles_fp(xfp, yfp, izs, ids, tris, depth, label, tri, r0, r1)

    _run_bands(task, camera.height, workers)
    mask = MaskImage(labels=label, depth=depth)

    if light_direction is None:
        return mask, None
    light = np.asarray(light_direction, dtype=float)
    light = light / np.linalg.norm(light)
    norms = np.linalg.norm(normals, axis=1)
    unit = normals / np.where(norms > 0, norms, 1.0)[:, None]
    tri_shade = np.clip(unit @ light, 0.0, 1.0) * 255.0
    ground_shade = max(0.0, float(light[2])) * 255.0

    preview = np.zeros((camera.height, camera.width), dtype=np.float64)
    hit = tri >= 0
    if hit.any():
        # tri indices are global across instances and dense per mesh order
        shade_table = np.zeros(int(tris.max()) + 1 if tris.size else 1)
        shade_table[tris] = tri_shade
        preview[hit] = shade_table[tri[hit]]
    ground = (~hit) & np.isfinite(depth)
    preview[ground] = ground_shade
    return mask, np.rint(preview).astype(np.uint8)


def rasterize(scene: Scene, camera: Camera, workers: int = 1,
              cull_backfaces: bool = False) -> MaskImage:
    """Z-buffered segmentation mask of the scene (labels + depth)."""
    mask, _ = render_scene(scene, camera, None, workers, cull_backfaces)
    return mask


def shade_preview(scene: Scene, camera: Camera, light_direction: np.ndarray,
                  workers: int = 1, cull_backfaces: bool = False) -> np.ndarray:
    """Flat-shaded 8-bit grayscale preview with the same visibility as
    :func:`rasterize`."""
    _, preview = render_scene(scene, camera, light_direction, workers, cull_backfaces)
    assert preview is not None
    return preview


def mask_pgm_bytes(mask: MaskImage) -> bytes:
    """16-bit big-endian binary PGM encoding of the label grid."""
    labels = mask.labels
    if labels.min() < 0 or labels.max() > 65535:
        raise ValueError("labels must fit in [0, 65535] for PGM output")
    header = f"P5\n{mask.width} {mask.height}\n65535\n".encode("ascii")
    return header + labels.astype(">u2").tobytes()


def write_mask_pgm(mask: MaskImage, destination) -> int:
    """Write the label PGM to a path or binary file object."""
    data = mask_pgm_bytes(mask)
    if hasattr(destination, "write"):
        destination.write(data)
    else:
        Path(destination).write_bytes(data)
    return len(data)


def preview_pgm_bytes(image: np.ndarray) -> bytes:
    """8-bit binary PGM encoding of a grayscale image."""
    img = np.asarray(image)
    if img.dtype != np.uint8 or img.ndim != 2:
        raise ValueError("preview must be a 2-D uint8 array")
    header = f"P5\n{img.shape[1]} {img.shape[0]}\n255\n".encode("ascii")
    return header + img.tobytes()


def write_preview_pgm(image: np.ndarray, destination) -> int:
    data = preview_pgm_bytes(image)
    if hasattr(destination, "write"):
        destination.write(data)
    else:
        Path(destination).write_bytes(data)
    return len(data)


def read_pgm(source) -> np.ndarray:
    """Read a binary PGM written by this module; returns int32 labels for
    maxval 65535 and uint8 for maxval 255."""
    if hasattr(source, "read"):
        data = source.read()
    else:
        data = Path(source).read_bytes()
    fields: list[bytes] = []
    pos = 0
    while len(fields) < 4:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b"#":
            while pos < len(data) and data[pos] != 0x0A:
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        fields.append(data[start:pos])
    pos += 1  # single whitespace after maxval
    if fields[0] != b"P5":
        raise ValueError("not a binary PGM file")
    width, height, maxval = int(fields[1]), int(fields[2]), int(fields[3])
    payload = data[pos:]
    if maxval == 65535:
        expected = width * height * 2
        if len(payload) != expected:
            raise ValueError(f"payload size {len(payload)} != {expected}")
        return np.frombuffer(payload, dtype=">u2").reshape(height, width).astype(np.int32)
    if maxval == 255:
        expected = width * height
        if len(payload) != expected:
            raise ValueError(f"payload size {len(payload)} != {expected}")
        return np.frombuffer(payload, dtype=np.uint8).reshape(height, width).copy()
    raise ValueError(f"unsupported maxval {maxval}")
