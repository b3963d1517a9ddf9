import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trihausdorff import geometry
from trihausdorff.geometry import Plane
from trihausdorff.oracle import point_soup_distance
from trihausdorff.mesh import TriangleSoup

T = np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])

coord = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
point = st.tuples(coord, coord, coord).map(np.array)


def grid_min(p, t, m=1000):
    i, j = np.meshgrid(np.arange(m + 1), np.arange(m + 1), indexing="ij")
    keep = i + j <= m
    u, v = i[keep] / m, j[keep] / m
    x = t[0] + u[:, None] * (t[1] - t[0]) + v[:, None] * (t[2] - t[0])
    return np.linalg.norm(x - p, axis=1).min()


class TestClosestPoint:
    def test_above_vertex(self):
        q, d = geometry.closest_point_on_triangle([0, 0, 1], T)
        np.testing.assert_array_equal(q, [0, 0, 0])
        assert d == 1.0

    def test_inside(self):
        q, d = geometry.closest_point_on_triangle([0.25, 0.25, 0], T)
        np.testing.assert_allclose(q, [0.25, 0.25, 0])
        assert d == pytest.approx(0.0, abs=1e-15)

    def test_hypotenuse(self):
        q, d = geometry.closest_point_on_triangle([2, 2, 0], T)
        np.testing.assert_allclose(q, [0.5, 0.5, 0], atol=1e-15)
        assert d == pytest.approx(math.sqrt(4.5), rel=1e-15)
        # grid search over ~5e5 barycentric points
        assert grid_min(np.array([2.0, 2.0, 0.0]), T) == pytest.approx(d, abs=1e-6)

    def test_degenerate_triangle(self):
        seg = np.array([[0.0, 0, 0], [2, 0, 0], [1, 0, 0]])
        q, d = geometry.closest_point_on_triangle([1, 1, 0], seg)
        np.testing.assert_allclose(q, [1, 0, 0])
        assert d == pytest.approx(1.0)
        pt = np.zeros((3, 3))
        _, d = geometry.closest_point_on_triangle([3, 4, 0], pt)
        assert d == pytest.approx(5.0)

    def test_bad_shape(self):
        with pytest.raises(ValueError):
            geometry.closest_point_on_triangle([0, 0, 0], np.zeros((2, 3)))

    @settings(max_examples=200, deadline=None)
    @given(point, point, point, point)
    def test_matches_numpy_oracle(self, p, a, b, c):
        t = np.array([a, b, c])
        q, d = geometry.closest_point_on_triangle(p, t)
        ref = point_soup_distance(p, TriangleSoup(t, [[0, 1, 2]]))[0]
        assert d == pytest.approx(ref, abs=1e-9 * (1 + np.abs(t).max() + np.abs(p).max()))
        assert np.linalg.norm(q - p) == pytest.approx(d, abs=1e-9 * (1 + d))


class TestTriangleG:
    def test_equilateral(self):
        t = np.array([[0, 0, 0], [1, 0, 0], [0.5, math.sqrt(3) / 2, 0]])
        assert geometry.triangle_g(t) == pytest.approx(1 / math.sqrt(3), rel=1e-12)

    def test_obtuse(self):
        t = np.array([[0, 0, 0], [4, 0, 0], [2, 0.1, 0]])
        assert geometry.triangle_g(t) == pytest.approx(2.0, rel=1e-12)

    def test_collinear(self):
        t = np.array([[0, 0, 0], [1, 0, 0], [2, 0, 0]], dtype=float)
        assert geometry.triangle_g(t) == pytest.approx(1.0)

    @settings(max_examples=100, deadline=None)
    @given(point, point, point)
    def test_covers_triangle(self, a, b, c):
        t = np.array([a, b, c])
        g = geometry.triangle_g(t)
        r = np.random.default_rng(0).random((400, 2))
        r[r.sum(1) > 1] = 1 - r[r.sum(1) > 1]
        x = t[0] + r[:, :1] * (t[1] - t[0]) + r[:, 1:] * (t[2] - t[0])
        near = np.linalg.norm(x[:, None] - t[None], axis=2).min(axis=1)
        assert near.max() <= g * (1 + 1e-9) + 1e-12


class TestBisectors:
    def test_axis_midplane(self):
        pl = geometry.bisector_plane_of_points([0, 0, 0], [2, 0, 0])
        np.testing.assert_allclose(np.abs(pl.normal), [1, 0, 0])
        assert pl.signed_distance([1, 0, 0]) == pytest.approx(0)

    def test_coincident(self):
        assert geometry.bisector_plane_of_points([1, 1, 1], [1, 1, 1]).degenerate

    def test_diagonal_equidistant(self, rng):
        q1, q2 = np.zeros(3), np.array([1.0, 1.0, 0.0])
        pl = geometry.bisector_plane_of_points(q1, q2)
        np.testing.assert_allclose(np.abs(pl.normal), [2 ** -0.5, 2 ** -0.5, 0], atol=1e-15)
        x = rng.normal(size=(100, 3))
        x -= (x @ pl.normal + pl.offset)[:, None] * pl.normal
        np.testing.assert_allclose(np.linalg.norm(x - q1, axis=1),
                                   np.linalg.norm(x - q2, axis=1), atol=1e-10)

    def test_planes_equidistant(self, rng):
        p1 = Plane.through([0, 0, 1], [0, 0, 0])
        p2 = Plane.through([1, 0, 0], [0, 0, 0])
        bis = geometry.bisector_plane_of_planes(p1, p2, [1, 0, 1])
        n = bis.normal / np.linalg.norm(bis.normal)
        assert abs(abs(n[0]) - 2 ** -0.5) < 1e-12 and abs(abs(n[2]) - 2 ** -0.5) < 1e-12
        x = rng.normal(size=(100, 3))
        x -= (x @ bis.normal + bis.offset)[:, None] * bis.normal / (bis.normal @ bis.normal)
        for xi in x:
            assert abs(p1.signed_distance(xi)) == pytest.approx(abs(p2.signed_distance(xi)), abs=1e-10)

    def test_hint_selects_wedge(self):
        # hint on the same side of both planes -> n1 - n2, which passes between them
        p1 = Plane.through([0, 0, 1], [0, 0, 0])
        p2 = Plane.through([1, 0, 0], [0, 0, 0])
        bis = geometry.bisector_plane_of_planes(p1, p2, [1, 0, 1])
        assert bis.signed_distance([1, 0, 1]) == pytest.approx(0, abs=1e-12)
        bis = geometry.bisector_plane_of_planes(p1, p2, [1, 0, -1])
        assert bis.signed_distance([1, 0, -1]) == pytest.approx(0, abs=1e-12)

    def test_parallel(self):
        p1 = Plane.through([0, 0, 1], [0, 0, 0])
        assert geometry.bisector_plane_of_planes(p1, p1, [0, 0, 1]).degenerate
        p2 = Plane.through([0, 0, 1], [0, 0, 1])
        assert geometry.bisector_plane_of_planes(p1, p2, [0, 0, 1]).degenerate

    def test_rejects_degenerate_input(self):
        bad = Plane.from_tuple(None)
        with pytest.raises(ValueError):
            geometry.bisector_plane_of_planes(bad, bad, [0, 0, 0])


class TestSegmentPlane:
    z0 = Plane.through([0, 0, 1], [0, 0, 0])

    def test_crossing(self):
        h = geometry.segment_plane_intersection([0, 0, -1], [0, 0, 1], self.z0)
        assert h.hit and h.parameter == pytest.approx(0.5)
        np.testing.assert_allclose(h.point, [0, 0, 0], atol=1e-15)

    def test_same_side(self):
        assert not geometry.segment_plane_intersection([0, 0, 1], [0, 0, 2], self.z0).hit

    def test_oblique(self):
        z1 = Plane.through([0, 0, 1], [0, 0, 1])
        h = geometry.segment_plane_intersection([0, 0, 0], [1, 0, 3], z1)
        assert h.hit and h.parameter == pytest.approx(1 / 3, rel=1e-14)
        np.testing.assert_allclose(h.point, [1 / 3, 0, 1], rtol=1e-14)
        assert abs(z1.signed_distance(h.point)) < 1e-12


class TestSubdivide:
    def test_quarters(self):
        children, mids = geometry.midpoint_subdivide(T)
        assert len(children) == 4
        for c in children:
            assert geometry.triangle_area(c) == pytest.approx(0.125)
        np.testing.assert_allclose(mids[0], [0.5, 0, 0])

    def test_collinear(self):
        t = np.array([[0, 0, 0], [1, 0, 0], [3, 0, 0]], dtype=float)
        children, _ = geometry.midpoint_subdivide(t)
        for c in children:
            assert np.all(c[:, 1:] == 0)
            assert geometry.triangle_area(c) == 0.0

    def test_diameter_halves(self, rng):
        t = rng.normal(size=(3, 3))
        children, _ = geometry.midpoint_subdivide(t)
        for c in children:
            assert geometry.triangle_diameter(c) == pytest.approx(geometry.triangle_diameter(t) / 2)
