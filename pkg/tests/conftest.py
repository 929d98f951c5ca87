import hypothesis
import numpy as np
import pytest

import oystergen as og

hypothesis.settings.register_profile(
    "default", deadline=None, max_examples=60, derandomize=True)
hypothesis.settings.load_profile("default")


@pytest.fixture(scope="session")
def default_shell_mesh():
    rings = og.generate_shell(og.ShellParams(seed=42), 24)
    return og.stitch_rings(rings)


@pytest.fixture(scope="session")
def small_meshes():
    return [og.stitch_rings(og.generate_shell(og.ShellParams(seed=s), 16))
            for s in range(3)]


@pytest.fixture(scope="session")
def default_camera():
    return og.Camera.top_down(2000.0, 2000.0, 256, 256)


@pytest.fixture(scope="session")
def default_scene(small_meshes, default_camera):
    params = og.SceneParams(instance_count=12)
    return og.compose_scene(small_meshes, params, default_camera, seed=7)


def quad_mesh(vertices, triangles):
    """Minimal ShellMesh wrapper for handmade geometry."""
    v = np.asarray(vertices, dtype=float)
    t = np.asarray(triangles, dtype=np.int32)
    n = np.tile([0.0, 0.0, 1.0], (len(v), 1))
    uv = np.zeros((len(v), 2))
    return og.ShellMesh(vertices=v, triangles=t, normals=n, uvs=uv)
