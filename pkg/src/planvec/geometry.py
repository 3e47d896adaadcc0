"""Axis-aligned wall rectangles and the plan that collects them."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional


@dataclass(frozen=True, order=True)
class WallRect:
    """Half-open pixel rectangle ``[x0, x1) x [y0, y1)``.

    ``fill`` is the ink fraction measured when the rectangle was scored. It
    does not take part in equality or ordering.
    """

    x0: int
    y0: int
    x1: int
    y1: int
    fill: Optional[float] = field(default=None, compare=False)

    def __post_init__(self):
        if self.x1 <= self.x0 or self.y1 <= self.y0:
            raise ValueError(f"degenerate rectangle {self.coords}")

    @property
    def coords(self) -> tuple[int, int, int, int]:
        return (self.x0, self.y0, self.x1, self.y1)

    @property
    def width(self) -> int:
        return self.x1 - self.x0

    @property
    def height(self) -> int:
        return self.y1 - self.y0

    @property
    def area(self) -> int:
        return self.width * self.height

    def contains(self, other: "WallRect") -> bool:
        return (
            self.x0 <= other.x0
            and self.y0 <= other.y0
            and other.x1 <= self.x1
            and other.y1 <= self.y1
        )

    def intersection_area(self, other: "WallRect") -> int:
        w = min(self.x1, other.x1) - max(self.x0, other.x0)
        h = min(self.y1, other.y1) - max(self.y0, other.y0)
        return w * h if w > 0 and h > 0 else 0

    def within(self, width: int, height: int) -> bool:
        return self.x0 >= 0 and self.y0 >= 0 and self.x1 <= width and self.y1 <= height

    def with_fill(self, fill: Optional[float]) -> "WallRect":
        return WallRect(self.x0, self.y0, self.x1, self.y1, fill)


@dataclass(frozen=True)
class VectorPlan:
    canvas_width: int
    canvas_height: int
    walls: tuple[WallRect, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "walls", tuple(self.walls))
        if self.canvas_width < 1 or self.canvas_height < 1:
            raise ValueError("canvas must be at least 1x1")
        for w in self.walls:
            if not w.within(self.canvas_width, self.canvas_height):
                raise ValueError(f"wall {w.coords} outside canvas")

    def replace_walls(self, walls: Iterable[WallRect]) -> "VectorPlan":
        return VectorPlan(self.canvas_width, self.canvas_height, tuple(walls))
