"""End-to-end raster -> VectorPlan conversion."""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

import numpy as np

from planvec import raster
from planvec.corners import CornerParams, CornerPoint, detect_corners
from planvec.geometry import VectorPlan, WallRect
from planvec.postprocess import postprocess
from planvec.snap import AxisGrid, align_to_edges, snap_corners
from planvec.walls import (
    REFERENCE_WIDTH,
    FitParams,
    SummedAreaTable,
    build_sat,
    candidate_arrays,
    rect_ink,
    score_fill,
    select_from_arrays,
)

# (name, default, meaning) -- printed by `planvec --help`
DEFAULTS_TABLE = [
    ("threshold", 128, "ink iff gray < threshold"),
    ("quality-level", 0.05, "corner floor as a fraction of the strongest response"),
    ("min-distance", 8, "px between accepted corners"),
    ("window-radius", 2, "structure tensor box radius"),
    ("max-corners", "unlimited", "cap on detected corners"),
    ("snap-tol", 6, "px at 1024 wide, scaled with image width"),
    ("min-corner-ink", 0.2, "ink fraction a corner's neighbourhood needs (drops speckles)"),
    ("align-radius", 2, "px search for the ink edge behind each grid line"),
    ("min-fill", 0.85, "minimum ink fraction of a wall"),
    ("min-gain", 0.30, "minimum uncovered ink fraction to accept a wall"),
    ("min-thickness", 3, "px at 1024 wide, scaled"),
    ("max-thickness", 40, "px at 1024 wide, scaled"),
    ("min-length", 12, "px at 1024 wide, scaled"),
    ("edge-margin", 1, "px trimmed from each side before scoring fill"),
    ("detect-on", "binary", "run corner detection on the binary or gray image"),
]


@dataclass(frozen=True)
class PipelineConfig:
    """All vectorizer knobs.

    ``snap_tol`` and the length fields of ``fit`` are expressed at a
    1024 px reference width and rescaled to the actual image unless
    ``scale_to_image`` is off.
    """

    threshold: int = raster.DEFAULT_THRESHOLD
    corners: CornerParams = field(default_factory=CornerParams)
    min_corner_ink: float = 0.2
    snap_tol: float = 6.0
    align_radius: int = 2
    fit: FitParams = field(default_factory=FitParams)
    postprocess: bool = True
    detect_on: str = "binary"
    scale_to_image: bool = True

    def __post_init__(self):
        if not 0 <= self.threshold <= 255:
            raise ValueError("threshold must be in [0, 255]")
        if self.snap_tol <= 0:
            raise ValueError("snap_tol must be positive")
        if not 0 <= self.min_corner_ink <= 1:
            raise ValueError("min_corner_ink must be in [0, 1]")
        if self.align_radius < 0:
            raise ValueError("align_radius must be non-negative")
        if self.detect_on not in ("binary", "gray"):
            raise ValueError("detect_on must be 'binary' or 'gray'")

    def for_width(self, width: int) -> "PipelineConfig":
        if not self.scale_to_image:
            return self
        k = width / REFERENCE_WIDTH
        return replace(self, snap_tol=self.snap_tol * k, fit=self.fit.scaled(width), scale_to_image=False)


def supported_corners(
    corners: list[CornerPoint], sat: SummedAreaTable, radius: int, min_ink: float
) -> list[CornerPoint]:
    """Keep corners whose (2r+1)^2 neighbourhood is at least ``min_ink`` ink.

    Wall corners, convex or concave, sit next to roughly half a window of ink;
    isolated specks of a pixel or two do not.
    """
    if min_ink <= 0:
        return list(corners)
    out = []
    for c in corners:
        x, y = int(c.x), int(c.y)
        x0, y0 = max(x - radius, 0), max(y - radius, 0)
        x1, y1 = min(x + radius + 1, sat.width), min(y + radius + 1, sat.height)
        ink = rect_ink(sat, WallRect(x0, y0, x1, y1))
        if ink >= min_ink * (2 * radius + 1) ** 2:
            out.append(c)
    return out


@dataclass
class VectorizeResult:
    plan: VectorPlan
    corners: list[CornerPoint]
    grid: AxisGrid
    candidate_count: int
    elapsed: float


def vectorize(img: np.ndarray, config: PipelineConfig = PipelineConfig()) -> VectorizeResult:
    t0 = time.perf_counter()
    gray = raster.to_grayscale(img)
    binary = raster.binarize(gray, config.threshold)
    height, width = binary.shape
    cfg = config.for_width(width)

    sat = build_sat(binary)
    source = raster.to_intensity(binary) if cfg.detect_on == "binary" else gray
    corners = detect_corners(source, cfg.corners)
    corners = supported_corners(corners, sat, cfg.corners.window_radius + 1, cfg.min_corner_ink)
    # pixel indices -> continuous coordinates of the pixel centres
    centred = [CornerPoint(c.x + 0.5, c.y + 0.5, c.response) for c in corners]
    grid, _ = snap_corners(centred, cfg.snap_tol)
    grid = align_to_edges(grid, binary, cfg.align_radius)

    arrays = candidate_arrays(grid, cfg.fit, (width, height))
    walls = select_from_arrays(*arrays, sat, cfg.fit)
    plan = VectorPlan(width, height, tuple(walls))
    if cfg.postprocess:
        plan = postprocess(plan)
        plan = plan.replace_walls(score_fill(plan.walls, sat))
    return VectorizeResult(plan, corners, grid, len(arrays[0]), time.perf_counter() - t0)


def vectorize_file(path: str | Path, config: Optional[PipelineConfig] = None) -> VectorizeResult:
    return vectorize(raster.load_image(path), config or PipelineConfig())
