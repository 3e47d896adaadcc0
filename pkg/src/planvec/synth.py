"""Synthetic ground-truth plans, rasterization, corruption and wall matching.

Plans are a rectangular outer frame (four walls) split recursively by
axis-aligned partition walls. Every partition has one door gap, so it is
stored as one or two wall rectangles. Generation is driven by
:class:`planvec.rng.SplitMix64` and is reproducible from the seed alone.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from planvec.errors import ConfigError
from planvec.geometry import VectorPlan, WallRect
from planvec.postprocess import postprocess
from planvec.rng import SplitMix64, derive_seed, uniform_block


@dataclass(frozen=True)
class PlanConfig:
    canvas: int = 512
    thickness: int = 8
    door_width: int = 32
    partitions: tuple[int, int] = (3, 3)
    margin: Optional[int] = None
    min_segment: Optional[int] = None
    end_door_prob: float = 0.2
    max_attempts: int = 60

    def __post_init__(self):
        lo, hi = self.partitions
        if lo < 0 or hi < lo:
            raise ConfigError(f"bad partition range {self.partitions}")
        if self.thickness < 1 or self.door_width < 1:
            raise ConfigError("thickness and door_width must be positive")
        if not 0 <= self.end_door_prob <= 1:
            raise ConfigError("end_door_prob must be in [0, 1]")
        if self.frame_margin < 0:
            raise ConfigError("margin must be non-negative")
        interior = self.canvas - 2 * self.frame_margin - 2 * self.thickness
        if interior < self.min_room:
            raise ConfigError(
                f"canvas {self.canvas} too small: interior {interior} px is below the "
                f"{self.min_room} px a room needs at thickness {self.thickness}"
            )

    @property
    def frame_margin(self) -> int:
        return self.canvas // 16 if self.margin is None else self.margin

    @property
    def segment(self) -> int:
        return 5 * self.thickness if self.min_segment is None else self.min_segment

    @property
    def min_room(self) -> int:
        # a room must fit a crossing wall: two segments and a door
        return 2 * self.segment + self.door_width

    @property
    def align_gap(self) -> int:
        return 3 * self.thickness


@dataclass(frozen=True)
class GroundTruthPlan:
    canvas_width: int
    canvas_height: int
    walls: tuple[WallRect, ...]
    seed: int
    doors: tuple[WallRect, ...] = ()

    def as_vector_plan(self) -> VectorPlan:
        return VectorPlan(self.canvas_width, self.canvas_height, self.walls)


@dataclass
class _Region:
    x0: int
    y0: int
    x1: int
    y1: int


def _touches(a: WallRect, b: WallRect) -> bool:
    return a.x0 < b.x1 and b.x0 < a.x1 and a.y0 < b.y1 and b.y0 < a.y1


def generate_plan(seed: int, config: PlanConfig = PlanConfig()) -> GroundTruthPlan:
    rng = SplitMix64(seed)
    c = config
    t, d, m, n = c.thickness, c.door_width, c.frame_margin, c.canvas
    X0, Y0, X1, Y1 = m, m, n - m, n - m
    walls = [
        WallRect(X0, Y0, X1, Y0 + t),
        WallRect(X0, Y1 - t, X1, Y1),
        WallRect(X0, Y0 + t, X0 + t, Y1 - t),
        WallRect(X1 - t, Y0 + t, X1, Y1 - t),
    ]
    regions = [_Region(X0 + t, Y0 + t, X1 - t, Y1 - t)]
    doors: list[WallRect] = []
    # start coordinate of every wall per orientation ("v" walls are vertical)
    lines = {"v": [X0, X1 - t], "h": [Y0, Y1 - t]}

    lo, hi = c.partitions
    target = rng.randint(lo, hi)
    for _ in range(target):
        for _attempt in range(c.max_attempts):
            placed = _try_partition(rng, c, regions, walls, doors, lines)
            if placed:
                break
    plan = GroundTruthPlan(n, n, tuple(walls), seed, tuple(doors))
    # the generator never emits containment or mergeable pairs
    assert postprocess(plan.as_vector_plan()).walls == plan.walls
    return plan


def _try_partition(rng, c, regions, walls, doors, lines) -> bool:
    t, d = c.thickness, c.door_width
    ri = rng.randint(0, len(regions) - 1)
    r = regions[ri]
    w, h = r.x1 - r.x0, r.y1 - r.y0
    vertical = rng.uniform() < w / (w + h)
    span_lo, span_hi = (r.x0, r.x1) if vertical else (r.y0, r.y1)
    lo, hi = span_lo + c.min_room, span_hi - c.min_room - t
    if hi < lo:
        return False
    q = rng.randint(lo, hi)
    if any(abs(q - p) < c.align_gap for p in lines["v" if vertical else "h"]):
        return False

    along_lo, along_hi = (r.y0, r.y1) if vertical else (r.x0, r.x1)
    length = along_hi - along_lo
    if length - d < c.segment:
        return False
    roll = rng.uniform()
    if roll < c.end_door_prob / 2:
        g = along_lo
    elif roll < c.end_door_prob:
        g = along_hi - d
    else:
        g = rng.randint(along_lo + c.segment, along_hi - c.segment - d)

    def rect(a0, a1, b0, b1):
        # a: across the wall (thickness), b: along the wall
        return WallRect(a0, b0, a1, b1) if vertical else WallRect(b0, a0, b1, a1)

    # keep wall ends clear of existing door openings
    halo = rect(q - 2 * t, q + 3 * t, along_lo - 2 * t, along_hi + 2 * t)
    if any(_touches(halo, door) for door in doors):
        return False

    pieces = [(along_lo, g), (g + d, along_hi)]
    for b0, b1 in pieces:
        if b1 > b0:
            walls.append(rect(q, q + t, b0, b1))
    doors.append(rect(q, q + t, g, g + d))
    lines["v" if vertical else "h"].append(q)
    if vertical:
        regions[ri:ri + 1] = [_Region(r.x0, r.y0, q, r.y1), _Region(q + t, r.y0, r.x1, r.y1)]
    else:
        regions[ri:ri + 1] = [_Region(r.x0, r.y0, r.x1, q), _Region(r.x0, q + t, r.x1, r.y1)]
    return True


def rasterize(plan: GroundTruthPlan | VectorPlan) -> np.ndarray:
    img = np.zeros((plan.canvas_height, plan.canvas_width), dtype=bool)
    for w in plan.walls:
        img[w.y0:w.y1, w.x0:w.x1] = True
    return img


@dataclass(frozen=True)
class NoiseConfig:
    speckle_rate: float = 0.0
    edge_jitter: int = 0
    gray_level: int = 255
    speckle_level: int = 96
    jitter_run: tuple[int, int] = (8, 48)

    def __post_init__(self):
        if not 0 <= self.speckle_rate <= 1:
            raise ConfigError("speckle_rate must lie in [0, 1]")
        if self.edge_jitter < 0:
            raise ConfigError("edge_jitter must be non-negative")
        if not 0 <= self.gray_level <= 255 or not 0 <= self.speckle_level <= 255:
            raise ConfigError("intensity levels must lie in [0, 255]")
        lo, hi = self.jitter_run
        if lo < 1 or hi < lo:
            raise ConfigError(f"bad jitter_run {self.jitter_run}")


_STREAM_JITTER = 1
_STREAM_SPECKLE = 2


def _run_offsets(rng: SplitMix64, n: int, amplitude: int, run: tuple[int, int]) -> np.ndarray:
    """Piecewise-constant offsets in [-amplitude, amplitude], runs of random length."""
    out = np.empty(n, dtype=np.int64)
    i = 0
    while i < n:
        length = rng.randint(*run)
        out[i:i + length] = rng.randint(-amplitude, amplitude)
        i += length
    return out


def jitter_edges(ink: np.ndarray, seed: int, amplitude: int, run: tuple[int, int] = (8, 48)) -> np.ndarray:
    """Make walls crooked by up to ``amplitude`` px.

    Each row is shifted horizontally and each column vertically by an
    offset that stays constant over runs of rows/columns, so vertical and
    horizontal wall faces become staircases of short straight pieces. Only
    pixels within ``amplitude`` of an edge can change.
    """
    h, w = ink.shape
    rng = SplitMix64(derive_seed(seed, _STREAM_JITTER))
    dx = _run_offsets(rng, h, amplitude, run)
    dy = _run_offsets(rng, w, amplitude, run)
    rows = np.clip(np.arange(h)[:, None] + dy[None, :], 0, h - 1)
    cols = np.clip(np.arange(w)[None, :] + dx[:, None], 0, w - 1)
    return ink[rows, cols]


def add_noise(img: np.ndarray, seed: int, config: NoiseConfig = NoiseConfig()) -> np.ndarray:
    """Single-channel corrupted rendering of a binary plan.

    Walls are made crooked by up to ``edge_jitter`` px (see
    :func:`jitter_edges`), background lifts to ``gray_level``, and a
    ``speckle_rate`` share of the background becomes ``speckle_level`` gray.
    """
    ink = np.asarray(img, dtype=bool)
    h, w = ink.shape
    if config.edge_jitter > 0:
        ink = jitter_edges(ink, seed, config.edge_jitter, config.jitter_run)
    out = np.where(ink, 0, config.gray_level).astype(np.uint8)
    if config.speckle_rate > 0:
        u = uniform_block(derive_seed(seed, _STREAM_SPECKLE), h * w).reshape(h, w)
        out[~ink & (u < config.speckle_rate)] = config.speckle_level
    return out


def rect_iou(a: WallRect, b: WallRect) -> float:
    inter = a.intersection_area(b)
    return inter / (a.area + b.area - inter)


@dataclass
class MatchReport:
    precision: float
    recall: float
    f1: float
    matches: list[tuple[int, int, float]] = field(default_factory=list)
    path_count_pred: int = 0
    path_count_truth: int = 0
    elapsed: float = 0.0


def match_walls(pred: Sequence[WallRect], truth: Sequence[WallRect], iou_threshold: float = 0.7) -> MatchReport:
    """Greedy one-to-one matching by descending IoU."""
    if not 0 < iou_threshold <= 1:
        raise ValueError("iou_threshold must be in (0, 1]")
    pairs = []
    for i, p in enumerate(pred):
        for j, q in enumerate(truth):
            iou = rect_iou(p, q)
            if iou >= iou_threshold:
                # symmetric tie-break so swapping the lists swaps the result
                key = (-iou, min(p.coords, q.coords), max(p.coords, q.coords))
                pairs.append((key, i, j, iou))
    pairs.sort(key=lambda e: e[0])
    used_p, used_t, matches = set(), set(), []
    for _, i, j, iou in pairs:
        if i not in used_p and j not in used_t:
            used_p.add(i)
            used_t.add(j)
            matches.append((i, j, iou))
    k = len(matches)
    precision = k / len(pred) if pred else 1.0
    recall = k / len(truth) if truth else 1.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return MatchReport(precision, recall, f1, matches, len(pred), len(truth))
