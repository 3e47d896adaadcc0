"""Shi-Tomasi corner detection on single-channel images."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from planvec.errors import TooSmallError


class CornerPoint(NamedTuple):
    x: float
    y: float
    response: float


@dataclass(frozen=True)
class CornerParams:
    quality_level: float = 0.05
    min_distance: float = 8.0
    max_corners: Optional[int] = None
    window_radius: int = 2

    def __post_init__(self):
        if not 0 < self.quality_level <= 1:
            raise ValueError("quality_level must be in (0, 1]")
        if self.min_distance < 1:
            raise ValueError("min_distance must be >= 1")
        if self.max_corners is not None and self.max_corners < 0:
            raise ValueError("max_corners must be non-negative")
        if self.window_radius < 1:
            raise ValueError("window_radius must be >= 1")


class GradientField(NamedTuple):
    gx: np.ndarray
    gy: np.ndarray

    @property
    def width(self) -> int:
        return self.gx.shape[1]

    @property
    def height(self) -> int:
        return self.gx.shape[0]


def sobel_gradients(gray: np.ndarray) -> GradientField:
    """3x3 Sobel responses with edge-replicate borders.

    Integer input gives integer (int64) output, so downstream sums are exact.
    """
    gray = np.asarray(gray)
    if gray.ndim != 2:
        raise ValueError("sobel_gradients expects a single-channel image")
    if gray.shape[0] < 3 or gray.shape[1] < 3:
        raise TooSmallError(f"image {gray.shape[1]}x{gray.shape[0]} is smaller than 3x3")
    dtype = np.int64 if np.issubdtype(gray.dtype, np.integer) else np.float64
    p = np.pad(gray.astype(dtype), 1, mode="edge")
    # column difference then [1, 2, 1] vertical smoothing, and the transpose
    dx = p[:, 2:] - p[:, :-2]
    gx = dx[:-2] + 2 * dx[1:-1] + dx[2:]
    dy = p[2:, :] - p[:-2, :]
    gy = dy[:, :-2] + 2 * dy[:, 1:-1] + dy[:, 2:]
    return GradientField(gx, gy)


def shi_tomasi_response(a, b, c):
    """Smaller eigenvalue of the structure tensor ``[[a, b], [b, c]]``.

    Works elementwise on arrays. Written as ``mean - radius`` which loses
    precision only when the eigenvalues are nearly equal and large.
    """
    half_diff = (np.asarray(a, dtype=np.float64) - c) / 2.0
    return (np.asarray(a, dtype=np.float64) + c) / 2.0 - np.hypot(half_diff, b)


def _box_sum(arr: np.ndarray, r: int) -> np.ndarray:
    """Sum over a (2r+1)^2 window, edge-replicated."""
    p = np.pad(arr, r, mode="edge")
    cs = np.zeros((p.shape[0] + 1, p.shape[1] + 1), dtype=p.dtype)
    np.cumsum(np.cumsum(p, axis=0), axis=1, out=cs[1:, 1:])
    k = 2 * r + 1
    h, w = arr.shape
    return cs[k:k + h, k:k + w] - cs[:h, k:k + w] - cs[k:k + h, :w] + cs[:h, :w]


def response_map(gray: np.ndarray, window_radius: int = 2) -> np.ndarray:
    g = sobel_gradients(gray)
    a = _box_sum(g.gx * g.gx, window_radius)
    b = _box_sum(g.gx * g.gy, window_radius)
    c = _box_sum(g.gy * g.gy, window_radius)
    resp = shi_tomasi_response(a, b, c)
    # tiny negatives come from rounding on rank-deficient tensors
    np.maximum(resp, 0.0, out=resp)
    return resp


def detect_corners(gray: np.ndarray, params: CornerParams = CornerParams()) -> list[CornerPoint]:
    """Corners sorted by descending response, ties broken by (y, x)."""
    gray = np.asarray(gray)
    if gray.ndim != 2:
        raise ValueError("detect_corners expects a single-channel image")
    side = 2 * params.window_radius + 3
    if gray.shape[0] < side or gray.shape[1] < side:
        raise TooSmallError(
            f"image {gray.shape[1]}x{gray.shape[0]} smaller than {side}x{side} "
            f"required by window_radius={params.window_radius}"
        )
    resp = response_map(gray, params.window_radius)
    peak = float(resp.max())
    if peak <= 0.0:
        return []
    ys, xs = np.nonzero(resp >= params.quality_level * peak)
    vals = resp[ys, xs]
    order = np.lexsort((xs, ys, -vals))

    h, w = resp.shape
    md = params.min_distance
    rad = int(math.ceil(md))
    oy, ox = np.mgrid[-rad:rad + 1, -rad:rad + 1]
    # strictly closer than min_distance is suppressed
    disk = (ox * ox + oy * oy) < md * md
    blocked = np.zeros((h + 2 * rad, w + 2 * rad), dtype=bool)

    out: list[CornerPoint] = []
    limit = params.max_corners
    for i in order:
        if limit is not None and len(out) >= limit:
            break
        y, x = int(ys[i]), int(xs[i])
        if blocked[y + rad, x + rad]:
            continue
        out.append(CornerPoint(float(x), float(y), float(vals[i])))
        blocked[y:y + 2 * rad + 1, x:x + 2 * rad + 1] |= disk
    return out
