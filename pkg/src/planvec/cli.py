"""``planvec`` command line.

Exit codes: 0 success, 2 input/config error, 3 candidate cap hit,
4 numeric failure. SVG, CSV and JSON lines go to stdout (or ``-o``);
everything meant for people goes to stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
import time
from dataclasses import asdict
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from planvec import raster
from planvec.corners import CornerParams
from planvec.errors import (
    ConfigError,
    GuidanceNumericError,
    TooDenseError,
    TooSmallError,
    UnsupportedFormatError,
)
from planvec.guidance import guided_descent_demo
from planvec.pipeline import DEFAULTS_TABLE, PipelineConfig, vectorize
from planvec.svg import to_svg
from planvec.synth import NoiseConfig, PlanConfig, add_noise, generate_plan, match_walls, rasterize
from planvec.walls import FitParams

EXIT_OK, EXIT_INPUT, EXIT_DENSE, EXIT_NUMERIC = 0, 2, 3, 4

log = logging.getLogger("planvec")


def _defaults_epilog() -> str:
    width = max(len(name) for name, _, _ in DEFAULTS_TABLE) + 2
    rows = [f"  --{name:<{width}} {str(default):<10} {meaning}" for name, default, meaning in DEFAULTS_TABLE]
    return "vectorizer defaults:\n" + "\n".join(rows)


def _add_pipeline_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("vectorizer")
    g.add_argument("--threshold", type=int, default=128)
    g.add_argument("--quality-level", type=float, default=0.05)
    g.add_argument("--min-distance", type=float, default=8.0)
    g.add_argument("--window-radius", type=int, default=2)
    g.add_argument("--max-corners", type=int, default=None)
    g.add_argument("--snap-tol", type=float, default=6.0)
    g.add_argument("--min-corner-ink", type=float, default=0.2)
    g.add_argument("--align-radius", type=int, default=2)
    g.add_argument("--min-fill", type=float, default=0.85)
    g.add_argument("--min-gain", type=float, default=0.30)
    g.add_argument("--min-thickness", type=float, default=3.0)
    g.add_argument("--max-thickness", type=float, default=40.0)
    g.add_argument("--min-length", type=float, default=12.0)
    g.add_argument("--edge-margin", type=int, default=1)
    g.add_argument("--detect-on", choices=("binary", "gray"), default="binary")
    g.add_argument("--no-scale", action="store_true", help="use pixel lengths as given, not per 1024 px")
    g.add_argument("--no-postprocess", action="store_true")


def _pipeline_config(a: argparse.Namespace) -> PipelineConfig:
    try:
        return PipelineConfig(
            threshold=a.threshold,
            corners=CornerParams(a.quality_level, a.min_distance, a.max_corners, a.window_radius),
            min_corner_ink=a.min_corner_ink,
            snap_tol=a.snap_tol,
            align_radius=a.align_radius,
            fit=FitParams(
                min_fill=a.min_fill,
                min_gain=a.min_gain,
                min_thickness=a.min_thickness,
                max_thickness=a.max_thickness,
                min_length=a.min_length,
                edge_margin=a.edge_margin,
            ),
            postprocess=not a.no_postprocess,
            detect_on=a.detect_on,
            scale_to_image=not a.no_scale,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _add_plan_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("synthetic plan")
    g.add_argument("--canvas", type=int, default=512)
    g.add_argument("--thickness", type=int, default=8)
    g.add_argument("--door-width", type=int, default=32)
    g.add_argument("--partitions", default="3", help="count or range LO..HI")
    g.add_argument("--speckle-rate", type=float, default=0.0)
    g.add_argument("--edge-jitter", type=int, default=0)
    g.add_argument("--gray-level", type=int, default=255)


def _parse_range(text: str) -> tuple[int, int]:
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            return int(lo), int(hi)
        return int(text), int(text)
    except ValueError:
        raise ConfigError(f"bad range {text!r}, expected N or LO..HI") from None


def _plan_config(a) -> PlanConfig:
    return PlanConfig(
        canvas=a.canvas, thickness=a.thickness, door_width=a.door_width, partitions=_parse_range(a.partitions)
    )


def _noise_config(a) -> Optional[NoiseConfig]:
    noise = NoiseConfig(a.speckle_rate, a.edge_jitter, a.gray_level)
    return None if noise == NoiseConfig() else noise


def _emit(text: str, output: Optional[str]) -> None:
    if output:
        Path(output).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)
        sys.stdout.flush()


def cmd_vectorize(a) -> int:
    cfg = _pipeline_config(a)
    img = raster.load_image(a.input)
    result = vectorize(img, cfg)
    plan = result.plan
    if a.debug_corners:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "y", "response"])
        for c in result.corners:
            w.writerow([int(c.x), int(c.y), repr(c.response)])
        Path(a.debug_corners).write_text(buf.getvalue(), encoding="utf-8")
    if not plan.walls:
        log.warning("no walls found in %s; writing an empty SVG", a.input)
    _emit(to_svg(plan), a.output)
    summary = {
        "paths": len(plan.walls),
        "elapsed_seconds": round(result.elapsed, 6),
        "image_size": [plan.canvas_width, plan.canvas_height],
    }
    print(json.dumps(summary), file=sys.stderr)
    return EXIT_OK


def cmd_synth(a) -> int:
    plan = generate_plan(a.seed, _plan_config(a))
    ink = rasterize(plan)
    noise = _noise_config(a)
    img = add_noise(ink, a.seed, noise) if noise else raster.to_intensity(ink)
    out = Path(a.output or f"plan_{a.seed}.png")
    raster.save_image(img, out)
    svg_path = Path(a.svg) if a.svg else out.with_suffix(".svg")
    svg_path.write_text(to_svg(plan.as_vector_plan()), encoding="utf-8", newline="\n")
    log.info("wrote %s and %s (%d walls)", out, svg_path, len(plan.walls))
    return EXIT_OK


def cmd_bench(a) -> int:
    lo, hi = _parse_range(a.seeds) if a.seeds else (a.seed, a.seed)
    if not 0 < a.iou <= 1:
        raise ConfigError("--iou must be in (0, 1]")
    plan_cfg = _plan_config(a)
    pipe_cfg = _pipeline_config(a)
    noise = _noise_config(a)
    params = {
        "plan": asdict(plan_cfg),
        "noise": asdict(noise) if noise else None,
        "iou": a.iou,
        "vectorizer": asdict(pipe_cfg),
    }
    lines = []
    for seed in range(lo, hi + 1):
        truth = generate_plan(seed, plan_cfg)
        ink = rasterize(truth)
        img = add_noise(ink, seed, noise) if noise else raster.to_intensity(ink)
        t0 = time.perf_counter()
        result = vectorize(img, pipe_cfg)
        elapsed = time.perf_counter() - t0
        report = match_walls(result.plan.walls, truth.walls, a.iou)
        row = {
            "seed": seed,
            "precision": report.precision,
            "recall": report.recall,
            "f1": report.f1,
            "path_count_pred": report.path_count_pred,
            "path_count_truth": report.path_count_truth,
            "elapsed_seconds": None if a.no_timing else round(elapsed, 6),
            "params": params,
        }
        lines.append(json.dumps(row) + "\n")
        if not a.output:
            _emit(lines[-1], None)
    if a.output:
        _emit("".join(lines), a.output)
    return EXIT_OK


def _load_mask(path: str) -> np.ndarray:
    img = raster.to_grayscale(raster.load_image(path))
    return img > 0


def cmd_guidance_demo(a) -> int:
    if a.mask:
        mask = _load_mask(a.mask)
        if a.size is not None and mask.shape != (a.size, a.size):
            raise ConfigError(f"mask is {mask.shape[1]}x{mask.shape[0]}, --size asks for {a.size}x{a.size}")
    else:
        n = a.size or 16
        if n < 2:
            raise ConfigError("--size must be at least 2")
        mask = np.zeros((n, n), dtype=bool)
        mask[n // 4:n - n // 4, n // 4:n - n // 4] = True
    try:
        schedule = [float(v) for v in a.alpha_bar.split(",")]
    except ValueError:
        raise ConfigError(f"bad --alpha-bar {a.alpha_bar!r}") from None
    initial = np.full(mask.shape, a.init, dtype=np.float64)
    try:
        traj = guided_descent_demo(initial, mask, a.scale, schedule, a.steps)
    except GuidanceNumericError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["step", "masked_mean"])
    for k, v in enumerate(traj, start=1):
        w.writerow([k, repr(v)])
    _emit(buf.getvalue(), a.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    def global_flags(suppress: bool) -> argparse.ArgumentParser:
        # subcommands get SUPPRESS defaults so they don't clobber flags given before them
        g = argparse.ArgumentParser(add_help=False)
        d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
        g.add_argument("-o", "--output", default=d(None), help="write the result here instead of stdout")
        g.add_argument("--json", action="store_true", default=d(False),
                       help="report errors and warnings on stderr as JSON")
        g.add_argument("--seed", type=int, default=d(1))
        return g

    common = global_flags(suppress=True)

    parser = argparse.ArgumentParser(
        prog="planvec",
        description="Vectorize raster floor plans into one SVG path per wall.",
        epilog=_defaults_epilog(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
        parents=[global_flags(suppress=False)],
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("vectorize", parents=[common], help="raster plan -> SVG",
                       epilog=_defaults_epilog(), formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("input")
    p.add_argument("--debug-corners", metavar="CSV", help="dump detected corners as x,y,response")
    _add_pipeline_args(p)
    p.set_defaults(func=cmd_vectorize)

    p = sub.add_parser("synth", parents=[common], help="write a synthetic plan raster and its SVG")
    p.add_argument("--svg", help="ground-truth SVG path (default: output with .svg)")
    _add_plan_args(p)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("bench", parents=[common], help="synth -> vectorize -> match, one JSON line per seed",
                       epilog=_defaults_epilog(), formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--seeds", help="inclusive seed range LO..HI (default: --seed)")
    p.add_argument("--iou", type=float, default=0.7)
    p.add_argument("--no-timing", action="store_true", help="emit elapsed_seconds as null")
    _add_plan_args(p)
    _add_pipeline_args(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("guidance-demo", parents=[common], help="CSV trajectory of the masked mean")
    p.add_argument("--size", type=int, default=None, help="side of the square image (default 16)")
    p.add_argument("--mask", help="mask image; nonzero pixels are masked")
    p.add_argument("--scale", type=float, default=0.25)
    p.add_argument("--alpha-bar", default="0.5", help="comma-separated schedule")
    p.add_argument("--steps", type=int, default=20)
    p.add_argument("--init", type=float, default=0.0, help="initial latent value")
    p.set_defaults(func=cmd_guidance_demo)
    return parser


class _JsonFormatter(logging.Formatter):
    def format(self, record):
        return json.dumps({"level": record.levelname.lower(), "message": record.getMessage()})


def _setup_logging(as_json: bool) -> logging.Handler:
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(_JsonFormatter() if as_json else logging.Formatter("planvec: %(levelname)s: %(message)s"))
    log.handlers[:] = [handler]
    log.setLevel(logging.INFO)
    log.propagate = False
    return handler


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _setup_logging(args.json)
    try:
        return args.func(args)
    except TooDenseError as exc:
        log.error("%s", exc)
        return EXIT_DENSE
    except GuidanceNumericError as exc:
        log.error("%s", exc)
        return EXIT_NUMERIC
    except (UnsupportedFormatError, TooSmallError, ConfigError, FileNotFoundError, IsADirectoryError, PermissionError) as exc:
        log.error("%s", exc)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
