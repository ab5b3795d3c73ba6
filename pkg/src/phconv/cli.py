"""Command-line interface.

Subcommands: synth, ingest, balance, split, generate, bench, inspect.
Pipeline flags can be overridden by a JSON config file (--config); every run
echoes the resolved configuration it actually used.
"""

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from phconv import imgprep
from phconv import dataset as ds
from phconv.complexes import complex_to_csv
from phconv.persistence import diagram_to_csv
from phconv.phc import (PHCConfig, global_ph, make_window_grid,
                        window_diagram, window_source, global_diagram)
from phconv.synth import synth_dataset
from phconv.vectorize import grid_to_csv

log = logging.getLogger("phconv")

_CFG_KEYS = ("filtration", "window", "stride", "resolution", "threshold",
             "invert", "morphology", "sigma", "weight", "range_max",
             "connectivity", "flag_triangles", "max_side", "workers")


def _add_pipeline_flags(p):
    p.add_argument("--filtration", choices=("height", "alpha", "lowerstar"),
                   default="height")
    p.add_argument("--window", type=int, default=32)
    p.add_argument("--stride", type=int, default=32)
    p.add_argument("--threshold", type=int, default=imgprep.DEFAULT_THRESHOLD)
    p.add_argument("--resolution", type=int, default=20)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--weight", choices=("linear", "constant"), default="linear")
    p.add_argument("--range-max", type=float, default=None, dest="range_max")
    p.add_argument("--invert", action="store_true")
    p.add_argument("--morphology", choices=("dilate", "erode", "none"),
                   default="dilate")
    p.add_argument("--connectivity", type=int, choices=(4, 8), default=8)
    p.add_argument("--no-flag-triangles", action="store_false",
                   dest="flag_triangles")
    p.add_argument("--max-side", type=int, default=512, dest="max_side")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--config", type=str, default=None,
                   help="JSON config file; its keys override flags")


def _resolve_config(args):
    cfg = {k: getattr(args, k) for k in _CFG_KEYS if hasattr(args, k)}
    extra = {"seed": getattr(args, "seed", 0)}
    if getattr(args, "config", None):
        overrides = json.loads(Path(args.config).read_text())
        for k, v in overrides.items():
            if k in _CFG_KEYS:
                cfg[k] = v
            else:
                extra[k] = v
    phc_cfg = PHCConfig(**cfg)
    resolved = dict(phc_cfg.describe(), **extra)
    print("resolved config: " + json.dumps(resolved, sort_keys=True),
          file=sys.stderr)
    return phc_cfg, extra


def _load_or_build_index(args):
    if getattr(args, "index", None):
        return ds.DatasetIndex.from_json(Path(args.index).read_text())
    return ds.ingest(args.input)


def cmd_synth(args):
    paths = synth_dataset(args.out, per_class=args.per_class, side=args.side,
                          seed=args.seed)
    print(f"wrote {len(paths)} images under {args.out}")
    return 0


def cmd_ingest(args):
    index = ds.ingest(args.input)
    print(json.dumps(index.counts(), indent=2))
    if args.out:
        Path(args.out).write_text(index.to_json())
        print(f"index written to {args.out}")
    return 0


def cmd_balance(args):
    index = ds.DatasetIndex.from_json(Path(args.index).read_text())
    index = ds.balance(index, target_per_class=args.target, seed=args.seed)
    Path(args.out).write_text(index.to_json())
    print(json.dumps(index.counts(), indent=2))
    return 0


def cmd_split(args):
    index = ds.DatasetIndex.from_json(Path(args.index).read_text())
    index = ds.split(index, ratios=tuple(args.ratios), seed=args.seed)
    Path(args.out).write_text(index.to_json())
    sizes = {s: sum(1 for e in index.entries if e.split == s) for s in ds.SPLITS}
    print(json.dumps(sizes, indent=2))
    return 0


def cmd_generate(args):
    cfg, extra = _resolve_config(args)
    mode = extra.get("mode", args.mode)
    index = _load_or_build_index(args)
    if args.balance_target:
        index = ds.balance(index, target_per_class=args.balance_target,
                           seed=args.seed)
    if not any(e.split for e in index.entries):
        index = ds.split(index, seed=args.seed)
    manifest = ds.export(index, cfg, args.out, mode=mode, workers=args.workers)
    print(f"exported {len(manifest['entries'])} arrays to {args.out}")
    return 0


def cmd_bench(args):
    cfg, extra = _resolve_config(args)
    index = _load_or_build_index(args)
    rows = ds.bench(index, sample_size=args.sample,
                    filtrations=tuple(args.filtrations.split(",")),
                    modes=tuple(args.modes.split(",")),
                    cfg=cfg, seed=args.seed)
    print(ds.bench_table(rows))
    if args.out:
        Path(args.out).write_text(ds.bench_csv(rows))
        print(f"csv written to {args.out}")
    return 0


def cmd_inspect(args):
    cfg, _extra = _resolve_config(args)
    img = imgprep.load_image(args.image)
    gray = imgprep.to_grayscale(img) if img.ndim == 3 else img
    while max(gray.shape) > cfg.max_side:
        gray = imgprep.resize_half(gray)

    if args.dump == "complex":
        from phconv.complexes import (build_adjacency_complex, build_alpha,
                                      build_lower_star)
        plane = window_source(gray, cfg)
        if cfg.filtration == "height":
            cx = build_adjacency_complex(plane, cfg.connectivity,
                                         cfg.flag_triangles)
        elif cfg.filtration == "alpha":
            cx = build_alpha(plane)
        else:
            cx = build_lower_star(plane, cfg.connectivity, cfg.flag_triangles)
        text = complex_to_csv(cx)
    elif args.dump == "diagram":
        if args.mode == "local":
            plane = window_source(gray, cfg)
            grid = make_window_grid(gray.shape[0], cfg.window, cfg.stride)
            m = cfg.window
            diagrams = [window_diagram(plane[r:r + m, c:c + m], cfg,
                                       window=(r, c))
                        for r, c in grid.origins]
            text = diagram_to_csv(diagrams)
        else:
            text = diagram_to_csv(global_diagram(gray, cfg))
    else:
        text = grid_to_csv(global_ph(gray, cfg))

    if args.out:
        Path(args.out).write_text(text)
        print(f"written to {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="phc",
        description="Windowed persistent homology features for raster images")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic labeled dataset")
    p.add_argument("--out", required=True)
    p.add_argument("--per-class", type=int, default=4)
    p.add_argument("--side", type=int, default=512)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_synth)

    p = sub.add_parser("ingest", help="index a class-subfoldered image directory")
    p.add_argument("--input", required=True)
    p.add_argument("--out", default=None, help="write the index JSON here")
    p.set_defaults(fn=cmd_ingest)

    p = sub.add_parser("balance", help="balance class counts in an index")
    p.add_argument("--index", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--target", type=int, default=ds.DEFAULT_BALANCE_TARGET)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_balance)

    p = sub.add_parser("split", help="stratified train/val/test split")
    p.add_argument("--index", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--ratios", type=float, nargs=3,
                   default=list(ds.DEFAULT_RATIOS))
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_split)

    p = sub.add_parser("generate", help="run the pipeline and export tensors")
    p.add_argument("--input", default=None, help="image directory to ingest")
    p.add_argument("--index", default=None, help="reuse a saved index JSON")
    p.add_argument("--out", required=True)
    p.add_argument("--mode", choices=ds.MODES, default="local")
    p.add_argument("--balance-target", type=int, default=None)
    _add_pipeline_flags(p)
    p.set_defaults(fn=cmd_generate)

    p = sub.add_parser("bench", help="mean per-image timing per filtration/mode")
    p.add_argument("--input", default=None)
    p.add_argument("--index", default=None)
    p.add_argument("--sample", type=int, default=100)
    p.add_argument("--filtrations", default="alpha,height,lowerstar")
    p.add_argument("--modes", default="local,global")
    p.add_argument("--out", default=None, help="CSV output path")
    _add_pipeline_flags(p)
    p.set_defaults(fn=cmd_bench)

    p = sub.add_parser("inspect", help="dump intermediates for one image")
    p.add_argument("image")
    p.add_argument("--dump", choices=("complex", "diagram", "grid"),
                   required=True)
    p.add_argument("--mode", choices=("local", "global"), default="global")
    p.add_argument("--out", default=None)
    _add_pipeline_flags(p)
    p.set_defaults(fn=cmd_inspect)
    return parser


def main(argv=None):
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    if args.command in ("generate", "bench") and not (args.input or args.index):
        print("error: need --input or --index", file=sys.stderr)
        return 2
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
