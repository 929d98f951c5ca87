"""Independent oracles the test suite checks the library against.

Everything here is deliberately written from the definitions (exact
rational arithmetic, brute-force scans) rather than reusing library code
paths, so agreement is meaningful.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np


def basis_fraction(i: int, k: int, t: Fraction, knots: list[Fraction],
                   dom_end: Fraction) -> Fraction:
    """Cox-de Boor recursion in exact rational arithmetic.

    Zero-denominator terms are zero; the last non-empty span owns the
    domain's right endpoint.
    """
    if k == 0:
        if knots[i] <= t < knots[i + 1]:
            return Fraction(1)
        if t == dom_end and knots[i] < knots[i + 1] == dom_end:
            return Fraction(1)
        return Fraction(0)
    total = Fraction(0)
    den1 = knots[i + k] - knots[i]
    if den1 != 0:
        total += (t - knots[i]) / den1 * basis_fraction(i, k - 1, t, knots, dom_end)
    den2 = knots[i + k + 1] - knots[i + 1]
    if den2 != 0:
        total += (knots[i + k + 1] - t) / den2 * basis_fraction(i + 1, k - 1, t, knots, dom_end)
    return total


def basis_exact(i: int, k: int, t, knots) -> Fraction:
    """Exact basis value for rational inputs."""
    kn = [Fraction(x) for x in knots]
    dom_end = kn[len(kn) - 1 - k]
    return basis_fraction(i, k, Fraction(t), kn, dom_end)


def shoelace_area(points: np.ndarray) -> float:
    """Signed area of a closed polygon given as (N, 2) vertices."""
    x = points[:, 0]
    y = points[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def polyline_length(points: np.ndarray) -> float:
    return float(np.linalg.norm(np.diff(points, axis=0), axis=1).sum())


def polygon_is_simple(points: np.ndarray) -> bool:
    """O(n^2) proper-crossing check for a closed polygon."""
    n = len(points)

    def seg(i):
        return points[i], points[(i + 1) % n]

    def orient(a, b, c):
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

    for i in range(n):
        a, b = seg(i)
        for j in range(i + 1, n):
            if j == i or (j + 1) % n == i or (i + 1) % n == j:
                continue  # shared endpoint
            c, d = seg(j)
            if (orient(a, b, c) * orient(a, b, d) < 0
                    and orient(c, d, a) * orient(c, d, b) < 0):
                return False
    return True


def rasterize_brute_force(xfp, yfp, inv_z, ids, tri_indices, width, height,
                          background_depth=None):
    """Per-pixel scan over every triangle with exact integer edge functions.

    Implements the same published coverage contract as the library (top-left
    rule on 1/256-pixel snapped coordinates, perspective-correct inverse
    depth, lexicographic (depth, id, triangle) visibility) but evaluates it
    independently, one pixel at a time, in pure Python integers.
    """
    sub = 256
    half = 128
    tri_count = len(xfp)
    if background_depth is None:
        background_depth = np.full((height, width), np.inf)
    depth = np.array(background_depth, dtype=float).copy()
    label = np.zeros((height, width), dtype=np.int32)
    tri = np.full((height, width), -1, dtype=np.int64)

    prepared = []
    for t in range(tri_count):
        x0, x1, x2 = (int(v) for v in xfp[t])
        y0, y1, y2 = (int(v) for v in yfp[t])
        iz0, iz1, iz2 = (float(v) for v in inv_z[t])
        area2 = (x1 - x0) * (y2 - y0) - (y1 - y0) * (x2 - x0)
        if area2 == 0:
            continue
        if area2 < 0:
            x1, x2 = x2, x1
            y1, y2 = y2, y1
            iz1, iz2 = iz2, iz1
            area2 = -area2

        def top_left(ax, ay, bx, by):
            return by - ay < 0 or (by == ay and bx > ax)

        prepared.append((
            (x0, y0, x1, y1, x2, y2),
            (iz0, iz1, iz2),
            area2,
            (0 if top_left(x1, y1, x2, y2) else -1,
             0 if top_left(x2, y2, x0, y0) else -1,
             0 if top_left(x0, y0, x1, y1) else -1),
            int(ids[t]),
            int(tri_indices[t]),
        ))

    for py in range(height):
        sy = py * sub + half
        for px in range(width):
            sx = px * sub + half
            for coords, izs, area2, biases, inst, tidx in prepared:
                x0, y0, x1, y1, x2, y2 = coords
                w0 = (x2 - x1) * (sy - y1) - (y2 - y1) * (sx - x1)
                if w0 + biases[0] < 0:
                    continue
                w1 = (x0 - x2) * (sy - y2) - (y0 - y2) * (sx - x2)
                if w1 + biases[1] < 0:
                    continue
                w2 = (x1 - x0) * (sy - y0) - (y1 - y0) * (sx - x0)
                if w2 + biases[2] < 0:
                    continue
                izc = (float(w0) * izs[0] + float(w1) * izs[1]
                       + float(w2) * izs[2]) / float(area2)
                zc = 1.0 / izc
                d = depth[py, px]
                if zc < d or (zc == d and (
                        inst < label[py, px]
                        or (inst == label[py, px] and tidx < tri[py, px]))):
                    depth[py, px] = zc
                    label[py, px] = inst
                    tri[py, px] = tidx
    return label, depth, tri


def voxel_volume(vertices: np.ndarray, triangles: np.ndarray,
                 resolution: int = 128) -> float:
    """Volume from counting voxel centers inside the closed surface.

    Casts one vertical ray per (x, y) cell center, collects surface
    crossings by scanning every triangle, and counts the voxel centers
    between entry/exit pairs. Raises if any ray sees an odd crossing
    count, which would mean the surface is not closed (or a ray grazed an
    edge exactly).
    """
    lo = vertices.min(axis=0)
    hi = vertices.max(axis=0)
    pad = 1e-4 * (hi - lo).max()
    lo = lo - pad
    hi = hi + pad
    h = (hi - lo) / resolution

    crossings: dict[tuple[int, int], list[float]] = {}
    for tri in triangles:
        a, b, c = vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]
        xs = np.array([a[0], b[0], c[0]])
        ys = np.array([a[1], b[1], c[1]])
        ix0 = max(0, int(np.ceil((xs.min() - lo[0]) / h[0] - 0.5)))
        ix1 = min(resolution - 1, int(np.floor((xs.max() - lo[0]) / h[0] - 0.5)))
        iy0 = max(0, int(np.ceil((ys.min() - lo[1]) / h[1] - 0.5)))
        iy1 = min(resolution - 1, int(np.floor((ys.max() - lo[1]) / h[1] - 0.5)))
        if ix0 > ix1 or iy0 > iy1:
            continue
        d1 = b - a
        d2 = c - a
        det = d1[0] * d2[1] - d1[1] * d2[0]
        if det == 0.0:
            continue  # vertical triangle: no vertical-ray crossing area
        for iy in range(iy0, iy1 + 1):
            ry = lo[1] + (iy + 0.5) * h[1]
            for ix in range(ix0, ix1 + 1):
                rx = lo[0] + (ix + 0.5) * h[0]
                px = rx - a[0]
                py = ry - a[1]
                u = (px * d2[1] - py * d2[0]) / det
                v = (d1[0] * py - d1[1] * px) / det
                if u < 0.0 or v < 0.0 or u + v > 1.0:
                    continue
                z = a[2] + u * d1[2] + v * d2[2]
                crossings.setdefault((ix, iy), []).append(z)

    total = 0
    for (ix, iy), zs in crossings.items():
        zs.sort()
        if len(zs) % 2 != 0:
            raise ValueError(f"odd crossing count at ray {(ix, iy)}: {len(zs)}")
        for z_in, z_out in zip(zs[0::2], zs[1::2]):
            k0 = int(np.ceil((z_in - lo[2]) / h[2] - 0.5))
            k1 = int(np.floor((z_out - lo[2]) / h[2] - 0.5))
            k0 = max(k0, 0)
            k1 = min(k1, resolution - 1)
            if k1 >= k0:
                total += k1 - k0 + 1
    return total * float(h[0] * h[1] * h[2])
