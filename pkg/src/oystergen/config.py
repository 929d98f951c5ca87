"""Run configuration: a flat `key = value` text format with full defaults.

Lines are UTF-8, one `key = value` pair each; blank lines and `#` comments
are ignored. Every key is optional. Schema (defaults in parentheses):

shell model
    mu1 (150), mu2 (150), sigma1 (150), sigma2 (15) : floats, noise stats
    alpha_min (15), alpha_max (20)  : layer-count bounds, ints >= 1
    growth_rate (0.97)              : in-growth factor in (0, 1]
    layer_depth (6)                 : z spacing per layer, > 0
    noise_scale (10)                : divisor applied to raw noise draws
    samples_per_half (32)           : curve samples per outline half, >= 8

scene
    instances_per_scene (25)        : int >= 1
    scale_min (25), scale_max (30)  : percent of image width, (0, 100]
    yaw_min (0), yaw_max (6.283...) : radians
    pitch_min/-max, roll_min/-max (+-0.2618) : radians
    max_overlap_fraction (0.5)      : allowed footprint-circle overlap
    extent_x (2000), extent_y (2000): ground rectangle, centered at origin
    ground_z (0)                    : seabed plane height

camera / image
    image_width (256), image_height (256)
    camera_altitude (2 * max extent): height above the ground plane
    camera_margin (1.05)            : framing margin around the extent

run
    num_shells (100), num_scenes (10)
    master_seed (0)
    workers (1)
    out_dir (out)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path

from .camera import Camera
from .scene import Rect, SceneParams
from .shell import ShellParams


class ConfigError(Exception):
    """Invalid or unknown configuration; maps to exit code 2."""


_DEG15 = math.radians(15.0)

_FLOAT_KEYS = {
    "mu1", "mu2", "sigma1", "sigma2", "growth_rate", "layer_depth",
    "noise_scale", "scale_min", "scale_max", "yaw_min", "yaw_max",
    "pitch_min", "pitch_max", "roll_min", "roll_max",
    "max_overlap_fraction", "extent_x", "extent_y", "ground_z",
    "camera_altitude", "camera_margin",
}
_INT_KEYS = {
    "alpha_min", "alpha_max", "samples_per_half", "instances_per_scene",
    "image_width", "image_height", "num_shells", "num_scenes",
    "master_seed", "workers",
}
_STR_KEYS = {"out_dir"}


@dataclass(frozen=True)
class RunConfig:
    mu1: float = 150.0
    mu2: float = 150.0
    sigma1: float = 150.0
    sigma2: float = 15.0
    alpha_min: int = 15
    alpha_max: int = 20
    growth_rate: float = 0.97
    layer_depth: float = 6.0
    noise_scale: float = 10.0
    samples_per_half: int = 32

    instances_per_scene: int = 25
    scale_min: float = 25.0
    scale_max: float = 30.0
    yaw_min: float = 0.0
    yaw_max: float = 2.0 * math.pi
    pitch_min: float = -_DEG15
    pitch_max: float = _DEG15
    roll_min: float = -_DEG15
    roll_max: float = _DEG15
    max_overlap_fraction: float = 0.5
    extent_x: float = 2000.0
    extent_y: float = 2000.0
    ground_z: float = 0.0

    image_width: int = 256
    image_height: int = 256
    camera_altitude: float | None = None
    camera_margin: float = 1.05

    num_shells: int = 100
    num_scenes: int = 10
    master_seed: int = 0
    workers: int = 1
    out_dir: str = "out"

    def __post_init__(self):
        for name in ("num_shells", "num_scenes", "instances_per_scene", "workers"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if self.samples_per_half < 8:
            raise ConfigError("samples_per_half must be >= 8")
        if self.image_width < 1 or self.image_height < 1:
            raise ConfigError("image dimensions must be >= 1")
        try:
            self.shell_params(seed=0)
            self.scene_params()
        except (ValueError, ConfigError) as exc:
            raise ConfigError(str(exc)) from None

    def shell_params(self, seed: int) -> ShellParams:
        return ShellParams(
            mu1=self.mu1, mu2=self.mu2, sigma1=self.sigma1, sigma2=self.sigma2,
            layer_range=(self.alpha_min, self.alpha_max),
            growth_rate=self.growth_rate, layer_depth=self.layer_depth,
            noise_scale=self.noise_scale, seed=seed,
        )

    def scene_params(self) -> SceneParams:
        return SceneParams(
            instance_count=self.instances_per_scene,
            scale_percent_range=(self.scale_min, self.scale_max),
            yaw_range=(self.yaw_min, self.yaw_max),
            pitch_range=(self.pitch_min, self.pitch_max),
            roll_range=(self.roll_min, self.roll_max),
            max_overlap_fraction=self.max_overlap_fraction,
            extent=Rect.centered(self.extent_x, self.extent_y),
            ground_z=self.ground_z,
        )

    def build_camera(self) -> Camera:
        return Camera.top_down(
            self.extent_x, self.extent_y, self.image_width, self.image_height,
            altitude=self.camera_altitude, ground_z=self.ground_z,
            margin=self.camera_margin,
        )


def parse_config_text(text: str) -> RunConfig:
    """Parse the key=value document into a validated RunConfig."""
    values: dict[str, object] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key in _FLOAT_KEYS:
            try:
                values[key] = float(value)
            except ValueError:
                raise ConfigError(f"line {lineno}: {key} needs a number, got {value!r}") from None
        elif key in _INT_KEYS:
            try:
                values[key] = int(value)
            except ValueError:
                raise ConfigError(f"line {lineno}: {key} needs an integer, got {value!r}") from None
        elif key in _STR_KEYS:
            values[key] = value
        else:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
    return RunConfig(**values)


def load_config(path) -> RunConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config_text(text)


def override_config(config: RunConfig, **kwargs) -> RunConfig:
    """dataclasses.replace with ConfigError on invalid results."""
    try:
        return replace(config, **kwargs)
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from None
