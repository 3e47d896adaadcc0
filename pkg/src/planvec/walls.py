"""Wall rectangle candidates from the snapped grid, scored against the raster.

Candidates are every grid-aligned rectangle with wall-like proportions.
Each is scored by its fill ratio (ink fraction, constant time through a
summed-area table) and a greedy pass keeps those that still explain enough
uncovered ink.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable, Sequence

import numpy as np

from planvec.errors import TooDenseError
from planvec.geometry import WallRect
from planvec.snap import AxisGrid

REFERENCE_WIDTH = 1024
MAX_CANDIDATES = 2_000_000


class SummedAreaTable:
    """Cumulative ink counts; ``table[j, i]`` is the ink in ``[0, i) x [0, j)``."""

    def __init__(self, table: np.ndarray):
        self.table = table

    @property
    def width(self) -> int:
        return self.table.shape[1] - 1

    @property
    def height(self) -> int:
        return self.table.shape[0] - 1

    def at(self, i: int, j: int) -> int:
        return int(self.table[j, i])

    def ink_mask(self) -> np.ndarray:
        return np.diff(np.diff(self.table, axis=0), axis=1) > 0


def build_sat(binary: np.ndarray) -> SummedAreaTable:
    b = np.asarray(binary, dtype=bool)
    if b.ndim != 2 or b.size == 0:
        raise ValueError("build_sat expects a non-empty 2-D mask")
    table = np.zeros((b.shape[0] + 1, b.shape[1] + 1), dtype=np.int64)
    np.cumsum(np.cumsum(b, axis=0, dtype=np.int64), axis=1, out=table[1:, 1:])
    return SummedAreaTable(table)


def rect_ink(sat: SummedAreaTable, r: WallRect) -> int:
    if not r.within(sat.width, sat.height):
        raise ValueError(f"rectangle {r.coords} outside {sat.width}x{sat.height} table")
    t = sat.table
    return int(t[r.y1, r.x1] - t[r.y0, r.x1] - t[r.y1, r.x0] + t[r.y0, r.x0])


def rect_ink_many(sat: SummedAreaTable, x0, y0, x1, y1) -> np.ndarray:
    t = sat.table
    return t[y1, x1] - t[y0, x1] - t[y1, x0] + t[y0, x0]


@dataclass(frozen=True)
class FitParams:
    min_fill: float = 0.85
    min_gain: float = 0.30
    min_thickness: float = 3.0
    max_thickness: float = 40.0
    min_length: float = 12.0
    edge_margin: int = 1
    max_candidates: int = MAX_CANDIDATES

    def __post_init__(self):
        if not 0 < self.min_fill <= 1:
            raise ValueError("min_fill must be in (0, 1]")
        if not 0 <= self.min_gain <= 1:
            raise ValueError("min_gain must be in [0, 1]")
        if not 0 < self.min_thickness <= self.max_thickness:
            raise ValueError("need 0 < min_thickness <= max_thickness")
        if self.min_length < 0:
            raise ValueError("min_length must be non-negative")
        if self.edge_margin < 0:
            raise ValueError("edge_margin must be non-negative")

    def scaled(self, image_width: int) -> "FitParams":
        """Lengths given at the 1024 px reference, rescaled to ``image_width``."""
        k = image_width / REFERENCE_WIDTH
        return replace(
            self,
            min_thickness=self.min_thickness * k,
            max_thickness=self.max_thickness * k,
            min_length=self.min_length * k,
        )


def _grid_lines(values: Iterable[float], limit: int) -> np.ndarray:
    v = np.floor(np.asarray(list(values), dtype=np.float64) + 0.5).astype(np.int64)
    return np.unique(np.clip(v, 0, limit))


def _pairs(lines: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    i, k = np.triu_indices(len(lines), k=1)
    lo, hi = lines[i], lines[k]
    return lo, hi, hi - lo


def _combine(thick_lo, thick_hi, thick_len, long_lo, long_hi, long_len, min_long):
    """All (thick pair, long pair) combos with long side >= ``min_long`` per thick pair."""
    order = np.argsort(long_len, kind="stable")
    sorted_len = long_len[order]
    starts = np.searchsorted(sorted_len, min_long, side="left")
    counts = len(sorted_len) - starts
    total = int(counts.sum())
    t_idx = np.repeat(np.arange(len(thick_len)), counts)
    # offset of each long pair within its thick pair's run
    run_start = np.repeat(np.cumsum(counts) - counts, counts)
    l_idx = order[np.repeat(starts, counts) + (np.arange(total) - run_start)]
    return thick_lo[t_idx], thick_hi[t_idx], long_lo[l_idx], long_hi[l_idx]


def count_candidates(grid: AxisGrid, params: FitParams, bounds: tuple[int, int]) -> int:
    return candidate_arrays(grid, params, bounds, count_only=True)


def candidate_arrays(grid, params, bounds, count_only=False):
    """Array form of :func:`enumerate_candidates`: ``(x0, y0, x1, y1)``."""
    width, height = bounds
    xs, ys = _grid_lines(grid.xs, width), _grid_lines(grid.ys, height)
    x_lo, x_hi, w = _pairs(xs)
    y_lo, y_hi, h = _pairs(ys)
    tmin, tmax, lmin = params.min_thickness, params.max_thickness, params.min_length

    # vertical walls: w <= h, w is the thickness; horizontal: h < w
    vx = (w >= tmin) & (w <= tmax)
    need_h = np.maximum(w[vx], lmin)
    hy = (h >= tmin) & (h <= tmax)
    need_w = np.maximum(np.floor(h[hy]) + 1, lmin)
    h_sorted, w_sorted = np.sort(h), np.sort(w)
    n_vert = int((len(h) - np.searchsorted(h_sorted, need_h, side="left")).sum())
    n_horz = int((len(w) - np.searchsorted(w_sorted, need_w, side="left")).sum())
    total = n_vert + n_horz
    if total > params.max_candidates:
        raise TooDenseError(total, params.max_candidates)
    if count_only:
        return total

    vx0, vx1, vy0, vy1 = _combine(x_lo[vx], x_hi[vx], w[vx], y_lo, y_hi, h, need_h)
    hy0, hy1, hx0, hx1 = _combine(y_lo[hy], y_hi[hy], h[hy], x_lo, x_hi, w, need_w)
    x0 = np.concatenate([vx0, hx0])
    y0 = np.concatenate([vy0, hy0])
    x1 = np.concatenate([vx1, hx1])
    y1 = np.concatenate([vy1, hy1])
    order = np.lexsort((y1, x1, y0, x0))
    return x0[order], y0[order], x1[order], y1[order]


def enumerate_candidates(grid: AxisGrid, params: FitParams, bounds: tuple[int, int]) -> list[WallRect]:
    """Every wall-shaped rectangle spanned by two x-lines and two y-lines.

    ``bounds`` is ``(width, height)``. Lines are rounded to integer pixels and
    clipped to the image. The shorter side must be a plausible wall
    thickness and the longer side at least ``min_length``. Raises
    :class:`TooDenseError` past ``params.max_candidates``.
    """
    x0, y0, x1, y1 = candidate_arrays(grid, params, bounds)
    return [WallRect(int(a), int(b), int(c), int(d)) for a, b, c, d in zip(x0, y0, x1, y1)]


def core_fill(sat: SummedAreaTable, x0, y0, x1, y1, margin: int) -> np.ndarray:
    """Fill ratio of each rectangle shrunk by ``margin`` px on every side.

    A face that wanders by up to ``margin`` px then costs nothing, so whole
    walls do not lose to luckier fragments of themselves. Rectangles too thin
    to shrink are scored as they are.
    """
    x0, y0, x1, y1 = (np.asarray(a, dtype=np.int64) for a in (x0, y0, x1, y1))
    if margin == 0:
        return rect_ink_many(sat, x0, y0, x1, y1) / ((x1 - x0) * (y1 - y0))
    thin = np.minimum(x1 - x0, y1 - y0) <= 2 * margin
    m = np.where(thin, 0, margin)
    a, b, c, d = x0 + m, y0 + m, x1 - m, y1 - m
    return rect_ink_many(sat, a, b, c, d) / ((c - a) * (d - b))


def select_walls(
    candidates: Sequence[WallRect], sat: SummedAreaTable, params: FitParams
) -> list[WallRect]:
    """Greedy wall selection.

    Candidates whose fill (measured inside ``edge_margin``, see
    :func:`core_fill`) is below ``min_fill`` are dropped. The rest are visited
    by that fill (descending), then area (descending), then coordinates. A candidate is
    accepted when at least ``min_gain`` of its ink is not yet covered by
    earlier acceptances. Input order and duplicates do not matter.
    """
    if not candidates:
        return []
    coords = np.array([c.coords for c in candidates], dtype=np.int64)
    return select_from_arrays(*coords.T, sat, params)


def select_from_arrays(x0, y0, x1, y1, sat: SummedAreaTable, params: FitParams) -> list[WallRect]:
    """Greedy selection; see :func:`select_walls`."""
    if len(x0) == 0:
        return []
    x0, y0, x1, y1 = np.unique(np.stack([x0, y0, x1, y1], axis=1), axis=0).T
    ink = rect_ink_many(sat, x0, y0, x1, y1)
    area = (x1 - x0) * (y1 - y0)
    fill = ink / area
    score = core_fill(sat, x0, y0, x1, y1, params.edge_margin)
    keep = score >= params.min_fill
    x0, y0, x1, y1, ink, area, fill, score = (
        a[keep] for a in (x0, y0, x1, y1, ink, area, fill, score)
    )
    order = np.lexsort((y1, x1, y0, x0, -area, -score))

    uncovered = sat.ink_mask()
    accepted = []
    for i in order:
        a, b, c, d = int(x0[i]), int(y0[i]), int(x1[i]), int(y1[i])
        fresh = np.count_nonzero(uncovered[b:d, a:c])
        if fresh > 0 and fresh >= params.min_gain * ink[i]:
            uncovered[b:d, a:c] = False
            accepted.append(WallRect(a, b, c, d, float(fill[i])))
    return accepted


def score_fill(walls: Iterable[WallRect], sat: SummedAreaTable) -> list[WallRect]:
    return [w.with_fill(rect_ink(sat, w) / w.area) for w in walls]
