"""Triangle meshes: ring stitching, validation, volume, OBJ export.

Stitching is index-aligned: point j of ring alpha joins point j of ring
alpha+1, which is valid because all rings are sampled at the same curve
parameters. Caps are centroid fans. The result is closed, 2-manifold and
wound counterclockwise seen from outside.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .shell import LayerRing


@dataclass(frozen=True)
class ShellMesh:
    vertices: np.ndarray   # (V, 3) float64
    triangles: np.ndarray  # (F, 3) int32, CCW seen from outside
    normals: np.ndarray    # (V, 3) unit vectors
    uvs: np.ndarray        # (V, 2) in [0, 1]^2


@dataclass(frozen=True)
class MeshValidation:
    """Report from :func:`validate_mesh`."""

    vertex_count: int
    triangle_count: int
    edge_count: int
    boundary_edge_count: int
    non_manifold_edge_count: int
    euler_characteristic: int
    degenerate_triangle_count: int
    indices_ok: bool
    winding_consistent: bool

    @property
    def is_closed(self) -> bool:
        return self.boundary_edge_count == 0

    @property
    def is_manifold(self) -> bool:
        return self.non_manifold_edge_count == 0

    @property
    def euler_ok(self) -> bool:
        return self.euler_characteristic == 2

    @property
    def ok(self) -> bool:
        return (self.indices_ok and self.is_closed and self.is_manifold
                and self.euler_ok and self.winding_consistent
                and self.degenerate_triangle_count == 0)


def stitch_rings(rings: list[LayerRing]) -> ShellMesh:
    """Stitch stacked rings into a closed mesh with caps.

    Requires >= 2 rings with equal point counts (>= 3) and strictly
    increasing z. For L rings of P points: V = L*P + 2 and
    F = 2*P*(L-1) + 2*P.
    """
    if len(rings) < 2:
        raise ValueError("need at least 2 rings to stitch")
    counts = {r.points.shape[0] for r in rings}
    if len(counts) != 1:
        raise ValueError(f"rings have mismatched point counts: {sorted(counts)}")
    p = counts.pop()
    if p < 3:
        raise ValueError("rings must have at least 3 points")
    zs = np.array([float(r.points[0, 2]) for r in rings])
    if not np.all(np.diff(zs) > 0):
        raise ValueError("ring z values must be strictly increasing")

    layers = len(rings)
    ring_pts = np.concatenate([r.points for r in rings], axis=0)
    bottom_centroid = rings[0].points.mean(axis=0)
    top_centroid = rings[-1].points.mean(axis=0)
    vertices = np.vstack([ring_pts, bottom_centroid, top_centroid])
    i_bottom = layers * p
    i_top = i_bottom + 1

    j = np.arange(p)
    jn = (j + 1) % p
    bands = []
    for a in range(layers - 1):
        lo = a * p
        hi = (a + 1) * p
        # (low_j, low_j+1, up_j+1) and (low_j, up_j+1, up_j): outward CCW
        bands.append(np.column_stack([lo + j, lo + jn, hi + jn]))
        bands.append(np.column_stack([lo + j, hi + jn, hi + j]))
    bottom_fan = np.column_stack([np.full(p, i_bottom), jn, j])
    top_lo = (layers - 1) * p
    top_fan = np.column_stack([np.full(p, i_top), top_lo + j, top_lo + jn])
    triangles = np.vstack(bands + [bottom_fan, top_fan]).astype(np.int32)

    u = (j / p)[None, :].repeat(layers, axis=0).ravel()
    v = (np.arange(layers) / (layers - 1))[:, None].repeat(p, axis=1).ravel()
    uvs = np.vstack([np.column_stack([u, v]), [0.5, 0.0], [0.5, 1.0]])

    normals = _vertex_normals(vertices, triangles)
    return ShellMesh(vertices=vertices, triangles=triangles, normals=normals, uvs=uvs)


def _vertex_normals(vertices: np.ndarray, triangles: np.ndarray) -> np.ndarray:
    v0 = vertices[triangles[:, 0]]
    v1 = vertices[triangles[:, 1]]
    v2 = vertices[triangles[:, 2]]
    face = np.cross(v1 - v0, v2 - v0)  # area-weighted
    acc = np.zeros_like(vertices)
    for col in range(3):
        np.add.at(acc, triangles[:, col], face)
    norms = np.linalg.norm(acc, axis=1)
    safe = np.where(norms > 0, norms, 1.0)
    out = acc / safe[:, None]
    out[norms == 0] = (0.0, 0.0, 1.0)
    return out


def face_normals(mesh: ShellMesh) -> np.ndarray:
    """Unit normals per triangle (zero-area faces get a zero vector)."""
    v = mesh.vertices
    t = mesh.triangles
    face = np.cross(v[t[:, 1]] - v[t[:, 0]], v[t[:, 2]] - v[t[:, 0]])
    norms = np.linalg.norm(face, axis=1)
    safe = np.where(norms > 0, norms, 1.0)
    out = face / safe[:, None]
    out[norms == 0] = 0.0
    return out


def signed_volume(mesh: ShellMesh) -> float:
    """Divergence-theorem volume; positive for outward CCW winding.

    Raises for an open mesh, where the quantity is meaningless.
    """
    report = validate_mesh(mesh)
    if not report.is_closed:
        raise ValueError(f"mesh is open: {report.boundary_edge_count} boundary edges")
    v = mesh.vertices
    t = mesh.triangles
    v0, v1, v2 = v[t[:, 0]], v[t[:, 1]], v[t[:, 2]]
    return float(np.einsum("ij,ij->i", v0, np.cross(v1, v2)).sum() / 6.0)


def validate_mesh(mesh: ShellMesh) -> MeshValidation:
    """Topology and orientation report; never raises, never mutates."""
    v = mesh.vertices
    t = np.asarray(mesh.triangles, dtype=np.int64)
    indices_ok = bool(t.size == 0 or (t.min() >= 0 and t.max() < v.shape[0]))

    directed = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]], axis=0)
    und = np.sort(directed, axis=1)
    _, und_counts = np.unique(und, axis=0, return_counts=True)
    edge_count = int(und_counts.size)
    boundary = int((und_counts == 1).sum())
    non_manifold = int((und_counts > 2).sum())

    # Consistent winding: no directed edge may repeat.
    _, dir_counts = np.unique(directed, axis=0, return_counts=True)
    winding_ok = bool(np.all(dir_counts == 1))

    areas = 0.5 * np.linalg.norm(
        np.cross(v[t[:, 1]] - v[t[:, 0]], v[t[:, 2]] - v[t[:, 0]]), axis=1
    ) if t.size else np.zeros(0)
    degenerate = int((areas <= 1e-12).sum())

    euler = int(v.shape[0] - edge_count + t.shape[0])
    return MeshValidation(
        vertex_count=int(v.shape[0]),
        triangle_count=int(t.shape[0]),
        edge_count=edge_count,
        boundary_edge_count=boundary,
        non_manifold_edge_count=non_manifold,
        euler_characteristic=euler,
        degenerate_triangle_count=degenerate,
        indices_ok=indices_ok,
        winding_consistent=winding_ok,
    )


def mesh_to_obj_bytes(mesh: ShellMesh) -> bytes:
    """Wavefront OBJ text as bytes; deterministic for a given mesh.

    Floats print with 9 significant digits, '.' separator, '\\n' endings;
    faces are `f a/a/a b/b/b c/c/c` with 1-based indices.
    """
    out = io.StringIO()
    for x, y, z in mesh.vertices:
        out.write(f"v {x:.9g} {y:.9g} {z:.9g}\n")
    for u, vv in mesh.uvs:
        out.write(f"vt {u:.9g} {vv:.9g}\n")
    for x, y, z in mesh.normals:
        out.write(f"vn {x:.9g} {y:.9g} {z:.9g}\n")
    for a, b, c in mesh.triangles + 1:
        out.write(f"f {a}/{a}/{a} {b}/{b}/{b} {c}/{c}/{c}\n")
    return out.getvalue().encode("ascii")


def export_obj(mesh: ShellMesh, destination) -> int:
    """Write the OBJ bytes to a path or binary file object; returns the
    byte count."""
    data = mesh_to_obj_bytes(mesh)
    if hasattr(destination, "write"):
        destination.write(data)
    else:
        Path(destination).write_bytes(data)
    return len(data)


def load_obj(source) -> ShellMesh:
    """Read an OBJ written by :func:`export_obj` (v/vt/vn/f triangles only)."""
    if hasattr(source, "read"):
        text = source.read()
        if isinstance(text, bytes):
            text = text.decode("ascii")
    else:
        text = Path(source).read_text(encoding="ascii")
    verts, uvs, normals, faces = [], [], [], []
    for line in text.splitlines():
        parts = line.split()
        if not parts or parts[0].startswith("#"):
            continue
        if parts[0] == "v":
            verts.append([float(x) for x in parts[1:4]])
        elif parts[0] == "vt":
            uvs.append([float(x) for x in parts[1:3]])
        elif parts[0] == "vn":
            normals.append([float(x) for x in parts[1:4]])
        elif parts[0] == "f":
            if len(parts) != 4:
                raise ValueError("only triangle faces are supported")
            faces.append([int(p.split("/")[0]) - 1 for p in parts[1:4]])
    v = np.asarray(verts, dtype=float)
    if v.ndim != 2 or v.shape[0] == 0:
        raise ValueError("OBJ contains no vertices")
    n = np.asarray(normals, dtype=float) if normals else np.zeros_like(v)
    uv = np.asarray(uvs, dtype=float) if uvs else np.zeros((v.shape[0], 2))
    return ShellMesh(
        vertices=v,
        triangles=np.asarray(faces, dtype=np.int32),
        normals=n,
        uvs=uv,
    )
