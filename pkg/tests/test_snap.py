import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import single_linkage
from planvec.corners import CornerPoint
from planvec.snap import AxisGrid, align_to_edges, edge_profile, snap_axis, snap_corners

values = st.lists(st.floats(0, 500, allow_nan=False), max_size=40)
tols = st.floats(0.1, 20)


class TestSnapAxis:
    def test_examples(self):
        assert snap_axis([], 2) == []
        assert snap_axis([9.8, 50.1, 10.2], 2) == pytest.approx([10.0, 50.1])
        assert snap_axis([0, 1.5, 3.0], 2) == pytest.approx([1.5])

    def test_bad_tol(self):
        with pytest.raises(ValueError):
            snap_axis([1.0], 0)

    @given(values, tols)
    def test_matches_pairwise_grouping(self, vals, tol):
        assert snap_axis(vals, tol) == pytest.approx(single_linkage(vals, tol))

    @given(values, tols)
    def test_fixed_point(self, vals, tol):
        once = snap_axis(vals, tol)
        assert snap_axis(once, tol) == once

    @given(values, tols, st.randoms())
    def test_permutation_invariant(self, vals, tol, rnd):
        shuffled = list(vals)
        rnd.shuffle(shuffled)
        assert snap_axis(shuffled, tol) == pytest.approx(snap_axis(vals, tol))

    @given(values, tols)
    def test_separated_and_sorted(self, vals, tol):
        out = snap_axis(vals, tol)
        assert all(b - a > tol for a, b in zip(out, out[1:]))


class TestSnapCorners:
    def test_square(self):
        pts = [CornerPoint(x, y, 1.0) for x in (10, 50) for y in (5, 45)]
        grid, snapped = snap_corners(pts, 2)
        assert grid == AxisGrid((10.0, 50.0), (5.0, 45.0))
        assert len(set(snapped)) == 4

    def test_shared_x(self):
        grid, snapped = snap_corners([CornerPoint(10.2, 5, 1), CornerPoint(9.8, 95, 1)], 2)
        assert grid.xs == pytest.approx((10.0,))
        assert snapped[0].x_index == snapped[1].x_index == 0

    def test_jittered_rectangle(self):
        rng = random.Random(7)
        for _ in range(200):
            base = [(20, 30), (120, 30), (20, 90), (120, 90)]
            pts = [CornerPoint(x + rng.uniform(-1, 1), y + rng.uniform(-1, 1), 1.0) for x, y in base]
            grid, _ = snap_corners(pts, 3)
            assert len(grid.xs) == 2 and len(grid.ys) == 2
            assert list(grid.xs) == pytest.approx(single_linkage([p.x for p in pts], 3))
            assert list(grid.ys) == pytest.approx(single_linkage([p.y for p in pts], 3))

    def test_grid_rejects_unsorted(self):
        with pytest.raises(ValueError):
            AxisGrid((3.0, 1.0), ())


class TestAlign:
    def test_profile(self):
        b = np.zeros((4, 6), bool)
        b[:, 2:4] = True
        assert edge_profile(b, "x").tolist() == [0, 0, 4, 0, 4, 0, 0]
        assert edge_profile(b.T, "y").tolist() == [0, 0, 4, 0, 4, 0, 0]

    def test_moves_onto_faces(self):
        b = np.zeros((40, 40), bool)
        b[10:30, 10:18] = True
        grid = align_to_edges(AxisGrid((11.5, 16.5), (8.5, 31.0)), b, 2)
        assert grid == AxisGrid((10, 18), (10, 30))

    def test_no_edges_rounds(self):
        b = np.zeros((20, 20), bool)
        assert align_to_edges(AxisGrid((4.5, 9.2), (3.49,)), b, 2) == AxisGrid((5, 9), (3,))
