"""Drop walls hidden inside other walls and fuse walls that form one rectangle."""

from __future__ import annotations

from typing import Optional, Sequence

from planvec.geometry import VectorPlan, WallRect


def remove_contained(walls: Sequence[WallRect]) -> list[WallRect]:
    """Drop every wall that lies inside another one (closed containment).

    Of several identical walls only the first is kept. Survivors keep their
    input order.
    """
    walls = list(walls)
    out = []
    for i, w in enumerate(walls):
        dropped = False
        for j, other in enumerate(walls):
            if i == j or not other.contains(w):
                continue
            # equal rectangles: the earlier one survives
            if other.coords != w.coords or j < i:
                dropped = True
                break
        if not dropped:
            out.append(w)
    return out


def merged(a: WallRect, b: WallRect) -> Optional[WallRect]:
    """The union of ``a`` and ``b`` if that union is itself a rectangle."""
    if a.y0 == b.y0 and a.y1 == b.y1 and a.x0 <= b.x1 and b.x0 <= a.x1:
        return WallRect(min(a.x0, b.x0), a.y0, max(a.x1, b.x1), a.y1)
    if a.x0 == b.x0 and a.x1 == b.x1 and a.y0 <= b.y1 and b.y0 <= a.y1:
        return WallRect(a.x0, min(a.y0, b.y0), a.x1, max(a.y1, b.y1))
    return None


def merge_rects(walls: Sequence[WallRect]) -> list[WallRect]:
    """Merge pairs whose union is a rectangle until none remain.

    Pairs are scanned in coordinate order and the scan restarts after every
    merge. The union takes the list slot of the earlier of the two walls.
    """
    walls = list(walls)
    while True:
        ranked = sorted(range(len(walls)), key=lambda k: (walls[k].coords, k))
        hit = None
        for p, i in enumerate(ranked):
            for j in ranked[p + 1:]:
                u = merged(walls[i], walls[j])
                if u is not None:
                    hit = (min(i, j), max(i, j), u)
                    break
            if hit:
                break
        if hit is None:
            return walls
        keep, drop, u = hit
        walls[keep] = u
        del walls[drop]


def postprocess(plan: VectorPlan) -> VectorPlan:
    walls = list(plan.walls)
    while True:
        cleaned = merge_rects(remove_contained(walls))
        if cleaned == walls:
            return plan.replace_walls(cleaned)
        walls = cleaned
