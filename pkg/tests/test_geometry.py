import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from swroute.geometry import Area, area_nonempty, min_area_distance, project_onto_windows
from swroute.model import SpaceWindow


class TestAreaNonempty:
    def test_overlapping_pair(self):
        assert area_nonempty([SpaceWindow((0.0, 0.0), 1.0), SpaceWindow((1.5, 0.0), 1.0)])

    def test_disjoint_pair(self):
        assert not area_nonempty([SpaceWindow((0.0, 0.0), 1.0), SpaceWindow((3.0, 0.0), 1.0)])

    def test_equilateral_triangle(self):
        # circumradius 1.7/sqrt(3) = 0.981 < 1: circumcenter inside all three
        side = 1.7
        centers = [(0.0, 0.0), (side, 0.0), (side / 2, side * math.sqrt(3) / 2)]
        assert area_nonempty([SpaceWindow(c, 1.0) for c in centers])

    def test_pairwise_overlap_is_not_enough(self):
        # each pair overlaps but the three disks share no common point
        side = 2.2
        centers = [(0.0, 0.0), (side, 0.0), (side / 2, side * math.sqrt(3) / 2)]
        wins = [SpaceWindow(c, 1.2) for c in centers]
        for i in range(3):
            for j in range(i + 1, 3):
                assert math.dist(centers[i], centers[j]) < 2.4
        assert not area_nonempty(wins)

    def test_zero_radius(self):
        assert area_nonempty([SpaceWindow((2.0, 2.0), 0.0), SpaceWindow((2.0, 2.0), 1.0)])
        assert not area_nonempty([SpaceWindow((2.0, 2.0), 0.0), SpaceWindow((4.0, 2.0), 1.0)])


class TestProjection:
    def test_single_disk_radial(self):
        area = Area((SpaceWindow((0.0, 0.0), 1.0),))
        assert area.project((5.0, 0.0)) == pytest.approx((1.0, 0.0))

    def test_inside_is_fixed(self):
        area = Area((SpaceWindow((0.0, 0.0), 1.0), SpaceWindow((1.0, 0.0), 1.0)))
        assert area.project((0.5, 0.1)) == (0.5, 0.1)

    def test_lens_corner(self):
        area = Area((SpaceWindow((0.0, 0.0), 1.0), SpaceWindow((1.0, 0.0), 1.0)))
        p = area.project((0.5, 5.0))
        assert p == pytest.approx((0.5, math.sqrt(3) / 2), abs=1e-4)

    def test_idempotent(self):
        area = Area((SpaceWindow((0.0, 0.0), 1.0), SpaceWindow((1.2, 0.4), 0.9)))
        p = area.project((4.0, -3.0))
        q = area.project(p)
        assert math.dist(p, q) <= 1e-6

    def test_membership_up_to_tolerance(self):
        area = Area((SpaceWindow((0.0, 0.0), 1.0), SpaceWindow((1.2, 0.4), 0.9)))
        for raw in [(4.0, -3.0), (-2.0, 2.0), (0.6, 0.2), (1.9, 1.1)]:
            assert area.contains(area.project(raw), tol=1e-6)

    @settings(max_examples=60, deadline=None)
    @given(
        st.tuples(st.floats(-4, 4), st.floats(-4, 4)),
        st.tuples(st.floats(-4, 4), st.floats(-4, 4)),
    )
    def test_nonexpansive(self, x, y):
        area = Area((SpaceWindow((0.0, 0.0), 1.0), SpaceWindow((1.0, 0.0), 1.0)))
        px, py = area.project(x), area.project(y)
        assert math.dist(px, py) <= math.dist(x, y) + 1e-9


class TestCentroid:
    def test_single_disk(self):
        assert Area((SpaceWindow((3.0, 4.0), 2.0),)).centroid() == pytest.approx((3.0, 4.0), abs=1e-9)

    def test_lens_symmetry(self):
        area = Area((SpaceWindow((0.0, 0.0), 1.0), SpaceWindow((1.0, 0.0), 1.0)))
        assert area.centroid() == pytest.approx((0.5, 0.0), abs=1e-3)

    def test_degenerate_point(self):
        assert Area((SpaceWindow((7.0, 7.0), 0.0),)).centroid() == (7.0, 7.0)

    def test_centroid_inside_area(self):
        area = Area((SpaceWindow((0.0, 0.0), 1.0), SpaceWindow((0.9, 0.5), 0.8)))
        assert area.contains(area.centroid(), tol=1e-6)

    def test_rotation_invariance(self):
        wins = (SpaceWindow((0.0, 0.0), 1.0), SpaceWindow((1.0, 0.0), 1.0))
        rot = lambda p: (-p[1], p[0])
        rotated = tuple(SpaceWindow(rot(w.center), w.radius) for w in wins)
        c = Area(wins).centroid()
        c2 = Area(rotated).centroid()
        assert math.dist(rot(c), c2) <= 1e-3


def test_min_area_distance():
    a = Area((SpaceWindow((0.0, 0.0), 1.0),))
    b = Area((SpaceWindow((5.0, 0.0), 1.0),))
    assert min_area_distance(a, b) == pytest.approx(3.0)
    c = Area((SpaceWindow((1.5, 0.0), 1.0),))
    assert min_area_distance(a, c) == 0.0


def test_empty_intersection_rejected():
    with pytest.raises(ValueError):
        Area((SpaceWindow((0.0, 0.0), 1.0), SpaceWindow((5.0, 0.0), 1.0)))
