"""Command line interface.

Subcommands::

    generate --config PATH [--seed N] [--workers N] [--out DIR]
    ablate   --config PATH --param NAME --values LIST
    validate PATH            # .obj mesh or .pgm mask/preview

Exit codes: 0 success, 1 I/O or validation failure, 2 config error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .config import ConfigError, load_config, override_config
from .mesh import load_obj, validate_mesh
from .pipeline import apply_sweep_value, run_ablation, run_generate
from .raster import read_pgm


def _parse_sweep_values(text: str) -> list:
    values = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        if "-" in item.lstrip("-"):  # "10-15" range; allow negative scalars
            head, _, tail = item.lstrip("-").partition("-")
            sign = -1.0 if item.startswith("-") else 1.0
            values.append((sign * float(head), float(tail)))
        else:
            values.append(float(item))
    if not values:
        raise ConfigError("--values is empty")
    return values


def _cmd_generate(args) -> int:
    config = load_config(args.config)
    overrides = {}
    if args.seed is not None:
        overrides["master_seed"] = args.seed
    if args.workers is not None:
        overrides["workers"] = args.workers
    if args.out is not None:
        overrides["out_dir"] = args.out
    if overrides:
        config = override_config(config, **overrides)
    records = run_generate(config)
    print(f"wrote {len(records)} artifacts to {config.out_dir}")
    return 0


def _cmd_ablate(args) -> int:
    config = load_config(args.config)
    values = _parse_sweep_values(args.values)
    for v in values:  # fail fast on malformed sweeps before generating
        apply_sweep_value(config, args.param, v)
    report = run_ablation(config, args.param, values)
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    report_path = out / f"ablation_{args.param}.tsv"
    report_path.write_text(report.to_tsv(), encoding="utf-8")
    sys.stdout.write(report.to_tsv())
    print(f"report written to {report_path}")
    return 0


def _cmd_validate(args) -> int:
    path = Path(args.path)
    suffix = path.suffix.lower()
    if suffix == ".obj":
        mesh = load_obj(path)
        report = validate_mesh(mesh)
        print(f"vertices        {report.vertex_count}")
        print(f"triangles       {report.triangle_count}")
        print(f"edges           {report.edge_count}")
        print(f"boundary edges  {report.boundary_edge_count}")
        print(f"closed          {report.is_closed}")
        print(f"manifold        {report.is_manifold}")
        print(f"euler V-E+F     {report.euler_characteristic}")
        print(f"winding ok      {report.winding_consistent}")
        print(f"degenerate tris {report.degenerate_triangle_count}")
        print("OK" if report.ok else "INVALID")
        return 0 if report.ok else 1
    if suffix == ".pgm":
        img = read_pgm(path)
        print(f"size   {img.shape[1]}x{img.shape[0]}")
        if img.dtype == np.uint8:
            print(f"kind   preview (8-bit), intensity range "
                  f"[{int(img.min())}, {int(img.max())}]")
        else:
            labels = sorted(int(v) for v in np.unique(img))
            print(f"kind   mask (16-bit), {len([v for v in labels if v > 0])} "
                  f"instances, labels {labels[:12]}{'...' if len(labels) > 12 else ''}")
        print("OK")
        return 0
    print(f"unsupported file type: {path.name}", file=sys.stderr)
    return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="oystergen",
                                     description="Procedural oyster dataset generator")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="generate shells, scenes and masks")
    gen.add_argument("--config", required=True)
    gen.add_argument("--seed", type=int, default=None)
    gen.add_argument("--workers", type=int, default=None)
    gen.add_argument("--out", default=None)
    gen.set_defaults(func=_cmd_generate)

    abl = sub.add_parser("ablate", help="sweep one shell/scene parameter")
    abl.add_argument("--config", required=True)
    abl.add_argument("--param", required=True)
    abl.add_argument("--values", required=True,
                     help="comma list, e.g. 50,100,150 or 10-15,15-20")
    abl.set_defaults(func=_cmd_ablate)

    val = sub.add_parser("validate", help="validate an .obj mesh or .pgm image")
    val.add_argument("path")
    val.set_defaults(func=_cmd_validate)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
