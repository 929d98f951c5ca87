"""Procedural oyster-shell generation and deterministic mask rendering."""

from .camera import Camera, project, project_many
from .config import ConfigError, RunConfig, load_config, parse_config_text
from .mesh import (
    MeshValidation,
    ShellMesh,
    export_obj,
    load_obj,
    mesh_to_obj_bytes,
    signed_volume,
    stitch_rings,
    validate_mesh,
)
from .metrics import binarize, foreground_fraction, instance_pixel_counts, iou
from .pipeline import (
    AblationReport,
    ManifestRecord,
    run_ablation,
    run_generate,
    scene_to_tsv_bytes,
)
from .raster import (
    MaskImage,
    mask_pgm_bytes,
    rasterize,
    read_pgm,
    render_scene,
    shade_preview,
    write_mask_pgm,
    write_preview_pgm,
)
from .rng import Rng, derive_seed, fnv1a64
from .scene import (
    InstancePose,
    Rect,
    Scene,
    SceneParams,
    compose_scene,
    sample_pose,
    xy_diameter,
)
from .shell import (
    BaseOutline,
    LayerRing,
    ShellGenerationError,
    ShellParams,
    build_layer,
    canonical_base_outline,
    generate_shell,
    layer_count,
    perturb_curve,
    perturb_outline,
    ring_roughness,
)
from .splines import (
    KnotValidation,
    SplineCurve,
    basis,
    eval_curve,
    eval_curve_deboor,
    make_clamped_knots,
    sample_curve,
    validate_knots,
)

__version__ = "0.1.0"
