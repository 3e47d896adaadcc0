"""Minimal SVG dialect: one closed H/V path per wall, nothing else.

Example document::

    <svg xmlns="http://www.w3.org/2000/svg" width="100" height="50" viewBox="0 0 100 50">
    <path d="M 0 0 H 20 V 4 H 0 Z" fill="#000000"/>
    </svg>
"""

from __future__ import annotations

import re

from planvec.errors import SvgParseError
from planvec.geometry import VectorPlan, WallRect

SVG_NS = "http://www.w3.org/2000/svg"

_HEADER = re.compile(
    r'<svg xmlns="http://www\.w3\.org/2000/svg" width="(\d+)" height="(\d+)" '
    r'viewBox="0 0 (\d+) (\d+)">'
)
_PATH = re.compile(r'<path d="M (\d+) (\d+) H (\d+) V (\d+) H (\d+) Z" fill="#000000"/>')
_CLOSE = "</svg>"


def header(width: int, height: int) -> str:
    return f'<svg xmlns="{SVG_NS}" width="{width}" height="{height}" viewBox="0 0 {width} {height}">'


def path_line(w: WallRect) -> str:
    return f'<path d="M {w.x0} {w.y0} H {w.x1} V {w.y1} H {w.x0} Z" fill="#000000"/>'


def to_svg(plan: VectorPlan) -> str:
    lines = [header(plan.canvas_width, plan.canvas_height)]
    lines.extend(path_line(w) for w in plan.walls)
    lines.append(_CLOSE)
    return "\n".join(lines) + "\n"


def parse_svg(text: str) -> VectorPlan:
    """Inverse of :func:`to_svg`. Anything outside the dialect is rejected."""
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise SvgParseError("empty document", 1)
    m = _HEADER.fullmatch(lines[0])
    if m is None:
        raise SvgParseError("expected <svg> header of the plan dialect", 1)
    width, height, vb_w, vb_h = (int(g) for g in m.groups())
    if (width, height) != (vb_w, vb_h):
        raise SvgParseError("viewBox does not match width/height", 1)
    if len(lines) < 2 or lines[-1] != _CLOSE:
        raise SvgParseError("missing closing </svg>", len(lines))
    walls = []
    for lineno, line in enumerate(lines[1:-1], start=2):
        p = _PATH.fullmatch(line)
        if p is None:
            raise SvgParseError(f"not a wall path: {line[:60]!r}", lineno)
        x0, y0, x1, y1, x0_back = (int(g) for g in p.groups())
        if x0_back != x0:
            raise SvgParseError("path does not close on its start column", lineno)
        try:
            walls.append(WallRect(x0, y0, x1, y1))
        except ValueError as exc:
            raise SvgParseError(str(exc), lineno) from None
    try:
        return VectorPlan(width, height, tuple(walls))
    except ValueError as exc:
        raise SvgParseError(str(exc), 1) from None
