"""Collapse corner coordinates onto shared axis lines."""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from planvec.corners import CornerPoint


@dataclass(frozen=True)
class AxisGrid:
    xs: tuple[float, ...]
    ys: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "xs", tuple(self.xs))
        object.__setattr__(self, "ys", tuple(self.ys))
        for name, vals in (("xs", self.xs), ("ys", self.ys)):
            if any(b <= a for a, b in zip(vals, vals[1:])):
                raise ValueError(f"{name} must be strictly increasing")


class SnappedCorner(NamedTuple):
    x_index: int
    y_index: int


def snap_axis(values: Iterable[float], tol: float) -> list[float]:
    """Single-linkage clustering on the sorted values; each cluster -> its mean.

    Neighbours with gap <= tol share a cluster, so a long chain of close
    values collapses even if its total span exceeds tol.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    vals = sorted(float(v) for v in values)
    if not vals:
        return []
    centers = []
    cluster = [vals[0]]
    for v in vals[1:]:
        if v - cluster[-1] <= tol:
            cluster.append(v)
        else:
            centers.append(sum(cluster) / len(cluster))
            cluster = [v]
    centers.append(sum(cluster) / len(cluster))
    return centers


def _nearest(lines: Sequence[float], v: float) -> int:
    i = bisect.bisect_left(lines, v)
    if i == 0:
        return 0
    if i == len(lines):
        return len(lines) - 1
    return i if lines[i] - v < v - lines[i - 1] else i - 1


def snap_corners(corners: Sequence[CornerPoint], tol: float) -> tuple[AxisGrid, list[SnappedCorner]]:
    grid = AxisGrid(snap_axis((c.x for c in corners), tol), snap_axis((c.y for c in corners), tol))
    snapped = [SnappedCorner(_nearest(grid.xs, c.x), _nearest(grid.ys, c.y)) for c in corners]
    return grid, snapped


def edge_profile(binary: np.ndarray, axis: str) -> np.ndarray:
    """Ink/background transition counts at every integer boundary.

    For ``axis="x"`` entry ``e`` counts rows where columns ``e-1`` and ``e``
    differ; the image border counts as background.
    """
    b = np.asarray(binary, dtype=bool)
    if axis == "y":
        b = b.T
    padded = np.pad(b, ((0, 0), (1, 1)), constant_values=False)
    return np.count_nonzero(padded[:, 1:] != padded[:, :-1], axis=0)


def align_axis(lines: Sequence[float], profile: np.ndarray, radius: int) -> list[int]:
    """Move each line to the transition-weighted centre of the edges near it.

    Only boundaries within ``radius`` of the rounded line take part. A line
    with no edge nearby is just rounded. Output is sorted and deduplicated.
    """
    n = len(profile) - 1
    out = set()
    for v in lines:
        r0 = min(max(int(np.floor(v + 0.5)), 0), n)
        lo, hi = max(0, r0 - radius), min(n, r0 + radius)
        weights = profile[lo:hi + 1].astype(np.float64)
        total = weights.sum()
        if total > 0:
            centre = float(np.dot(np.arange(lo, hi + 1), weights) / total)
            r0 = int(np.floor(centre + 0.5))
        out.add(r0)
    return sorted(out)


def align_to_edges(grid: AxisGrid, binary: np.ndarray, radius: int = 2) -> AxisGrid:
    """Integer grid whose lines sit on actual ink boundaries.

    Shi-Tomasi peaks sit about 1.5 px inside the corner's quadrant, on
    opposite sides for convex and concave corners, so snapped means can be
    off by up to two pixels from the wall face they came from. Crooked faces
    spread their transitions over neighbouring columns; the weighted centre
    recovers the average face position.
    """
    return AxisGrid(
        align_axis(grid.xs, edge_profile(binary, "x"), radius),
        align_axis(grid.ys, edge_profile(binary, "y"), radius),
    )
