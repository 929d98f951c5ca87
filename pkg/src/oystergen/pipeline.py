"""Batch generation and the ablation harness.

Every artifact gets its own stream via ``derive_seed(master_seed, kind,
index)``, so outputs are byte-identical for any worker count. The manifest
is one tab-separated record per artifact::

    kind <TAB> path <TAB> seed <TAB> params_hash <TAB> content_hash

where kind is shell | scene | mask | preview, seed is the unsigned decimal
stream seed, and both hashes are 16-hex-digit 64-bit FNV-1a values
(params_hash over the canonical parameter snapshot string, content_hash
over the file bytes). Records are ordered by kind, then index.

Scene files are tab-separated too: a header line per scene followed by one
line per instance::

    instance_id mesh_index tx ty tz qw qx qy qz scale

with floats printed to 9 significant digits.
"""

from __future__ import annotations

import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import ConfigError, RunConfig, override_config
from .mesh import ShellMesh, mesh_to_obj_bytes, signed_volume, stitch_rings
from .metrics import foreground_fraction, instance_pixel_counts
from .raster import DEFAULT_LIGHT, mask_pgm_bytes, preview_pgm_bytes, render_scene
from .rng import derive_seed, fnv1a64
from .scene import Scene, compose_scene
from .shell import generate_shell, ring_roughness

KIND_ORDER = {"shell": 0, "scene": 1, "mask": 2, "preview": 3}

ABLATION_PARAMS = ("mu1", "mu2", "sigma1", "sigma2", "alpha", "scale")


@dataclass(frozen=True)
class ManifestRecord:
    kind: str
    path: str
    seed: int
    params_hash: int
    content_hash: int

    def to_line(self) -> str:
        return (f"{self.kind}\t{self.path}\t{self.seed}\t"
                f"{self.params_hash:016x}\t{self.content_hash:016x}")

    @classmethod
    def from_line(cls, line: str) -> "ManifestRecord":
        kind, path, seed, ph, ch = line.rstrip("\n").split("\t")
        return cls(kind=kind, path=path, seed=int(seed),
                   params_hash=int(ph, 16), content_hash=int(ch, 16))


def _params_snapshot(config: RunConfig) -> str:
    pairs = []
    for name in sorted(config.__dataclass_fields__):
        if name in ("out_dir", "workers", "num_shells", "num_scenes"):
            continue  # irrelevant to artifact content
        pairs.append(f"{name}={getattr(config, name)!r}")
    return ";".join(pairs)


def scene_to_tsv_bytes(scene: Scene) -> bytes:
    out = io.StringIO()
    out.write(f"# scene\tseed={scene.seed}\tground_z={scene.ground_z:.9g}\t"
              f"extent={scene.extent.x0:.9g},{scene.extent.y0:.9g},"
              f"{scene.extent.x1:.9g},{scene.extent.y1:.9g}\n")
    out.write("# instance_id\tmesh_index\ttx\tty\ttz\tqw\tqx\tqy\tqz\tscale\n")
    for inst in scene.instances:
        p = inst.pose
        t = p.translation
        q = p.rotation
        out.write(f"{p.instance_id}\t{inst.mesh_index}\t"
                  f"{t[0]:.9g}\t{t[1]:.9g}\t{t[2]:.9g}\t"
                  f"{q[0]:.9g}\t{q[1]:.9g}\t{q[2]:.9g}\t{q[3]:.9g}\t"
                  f"{p.uniform_scale:.9g}\n")
    return out.getvalue().encode("ascii")


@dataclass
class ShellResult:
    index: int
    seed: int
    mesh: ShellMesh
    roughness: list[float]
    obj_bytes: bytes


@dataclass
class SceneResult:
    index: int
    seed: int
    scene: Scene
    scene_bytes: bytes
    mask_bytes: bytes
    preview_bytes: bytes
    foreground: float
    visible_instances: int


def _make_shell(config: RunConfig, index: int) -> ShellResult:
    seed = derive_seed(config.master_seed, "shell", index)
    rings = generate_shell(config.shell_params(seed), config.samples_per_half)
    mesh = stitch_rings(rings)
    return ShellResult(
        index=index,
        seed=seed,
        mesh=mesh,
        roughness=[ring_roughness(r) for r in rings],
        obj_bytes=mesh_to_obj_bytes(mesh),
    )


def _make_scene(config: RunConfig, meshes: list[ShellMesh], index: int) -> SceneResult:
    seed = derive_seed(config.master_seed, "scene", index)
    scene = compose_scene(meshes, config.scene_params(), config.build_camera(), seed)
    mask, preview = render_scene(scene, config.build_camera(), DEFAULT_LIGHT,
                                 cull_backfaces=True)
    return SceneResult(
        index=index,
        seed=seed,
        scene=scene,
        scene_bytes=scene_to_tsv_bytes(scene),
        mask_bytes=mask_pgm_bytes(mask),
        preview_bytes=preview_pgm_bytes(preview),
        foreground=foreground_fraction(mask),
        visible_instances=len(instance_pixel_counts(mask)),
    )


def _pool_map(fn, items, workers: int):
    if workers <= 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def generate_batch(config: RunConfig) -> tuple[list[ShellResult], list[SceneResult]]:
    """Generate the full shell and scene batch for a config, in memory."""
    shells = _pool_map(lambda i: _make_shell(config, i),
                       range(config.num_shells), config.workers)
    meshes = [s.mesh for s in shells]
    scenes = _pool_map(lambda j: _make_scene(config, meshes, j),
                       range(config.num_scenes), config.workers)
    return shells, scenes


def run_generate(config: RunConfig) -> list[ManifestRecord]:
    """Generate shells, scenes, masks and previews under config.out_dir and
    write manifest.tsv; returns the records."""
    out = Path(config.out_dir)
    for sub in ("shells", "scenes", "masks", "previews"):
        (out / sub).mkdir(parents=True, exist_ok=True)

    shells, scenes = generate_batch(config)
    params_hash = fnv1a64(_params_snapshot(config).encode("utf-8"))

    records: list[ManifestRecord] = []
    for s in shells:
        rel = f"shells/shell_{s.index:05d}.obj"
        (out / rel).write_bytes(s.obj_bytes)
        records.append(ManifestRecord("shell", rel, s.seed, params_hash,
                                      fnv1a64(s.obj_bytes)))
    for sc in scenes:
        for kind, rel, data in (
            ("scene", f"scenes/scene_{sc.index:05d}.tsv", sc.scene_bytes),
            ("mask", f"masks/scene_{sc.index:05d}_mask.pgm", sc.mask_bytes),
            ("preview", f"previews/scene_{sc.index:05d}_preview.pgm", sc.preview_bytes),
        ):
            (out / rel).write_bytes(data)
            records.append(ManifestRecord(kind, rel, sc.seed, params_hash,
                                          fnv1a64(data)))

    records.sort(key=lambda r: (KIND_ORDER[r.kind], r.path))
    manifest = "".join(r.to_line() + "\n" for r in records)
    (out / "manifest.tsv").write_text(manifest, encoding="utf-8")
    return records


@dataclass(frozen=True)
class AblationReport:
    """Statistics of one parameter sweep; values are the column labels."""

    param: str
    values: tuple[str, ...]
    stats: dict[str, tuple[float, ...]]

    def to_tsv(self) -> str:
        lines = [self.param + "\t" + "\t".join(self.values)]
        for name, row in self.stats.items():
            lines.append(name + "\t" + "\t".join(f"{v:.9g}" for v in row))
        return "\n".join(lines) + "\n"


def _format_sweep_value(value) -> str:
    if isinstance(value, tuple):
        return f"{value[0]:g}-{value[1]:g}"
    return f"{value:g}"


def apply_sweep_value(config: RunConfig, param: str, value) -> RunConfig:
    """One sweep override; `alpha` and `scale` take (lo, hi) ranges, the
    noise parameters take scalars."""
    if param not in ABLATION_PARAMS:
        raise ConfigError(
            f"unknown sweep parameter {param!r}; expected one of {ABLATION_PARAMS}")
    if param == "alpha":
        if not isinstance(value, tuple):
            raise ConfigError("alpha sweep values must be lo-hi ranges")
        return override_config(config, alpha_min=int(value[0]), alpha_max=int(value[1]))
    if param == "scale":
        if not isinstance(value, tuple):
            raise ConfigError("scale sweep values must be lo-hi ranges")
        return override_config(config, scale_min=float(value[0]), scale_max=float(value[1]))
    if isinstance(value, tuple):
        raise ConfigError(f"{param} sweep values must be scalars")
    return override_config(config, **{param: float(value)})


def run_ablation(config: RunConfig, param: str, values: list) -> AblationReport:
    """Sweep one parameter, holding everything else at config defaults.

    For each value the same derived seeds are reused, so runs differ only
    through the swept parameter. Reported statistics: mean ring roughness,
    mean mesh volume, mean mask foreground fraction, and mean count of
    visible instances per scene.
    """
    columns: dict[str, list[float]] = {
        "mean_ring_roughness": [],
        "mean_mesh_volume": [],
        "mean_foreground_fraction": [],
        "mean_visible_instances": [],
    }
    for value in values:
        cfg = apply_sweep_value(config, param, value)
        shells, scenes = generate_batch(cfg)
        roughness = [r for s in shells for r in s.roughness]
        volumes = [signed_volume(s.mesh) for s in shells]
        columns["mean_ring_roughness"].append(float(np.mean(roughness)))
        columns["mean_mesh_volume"].append(float(np.mean(volumes)))
        columns["mean_foreground_fraction"].append(
            float(np.mean([sc.foreground for sc in scenes])))
        columns["mean_visible_instances"].append(
            float(np.mean([sc.visible_instances for sc in scenes])))
    return AblationReport(
        param=param,
        values=tuple(_format_sweep_value(v) for v in values),
        stats={k: tuple(v) for k, v in columns.items()},
    )
