import math

import numpy as np
import pytest

from trihausdorff import _backend, geometry, oracle, spatial, synthetic
from trihausdorff.mesh import TriangleSoup
from trihausdorff.spatial import AabbTree

BACKENDS = _backend.available()


def test_single_leaf(single_face):
    tree = AabbTree(single_face)
    assert tree.n_nodes == 1 and tree.depth() == 0


def test_two_faces_two_leaves():
    s = TriangleSoup([[0, 0, 0], [1, 0, 0], [0, 1, 0], [10, 0, 0], [11, 0, 0], [10, 1, 0]],
                     [[0, 1, 2], [3, 4, 5]])
    old = spatial.LEAF_SIZE
    spatial.LEAF_SIZE = 1
    try:
        tree = AabbTree(s)
    finally:
        spatial.LEAF_SIZE = old
    assert tree.n_nodes == 3
    assert sorted(len(x) for x in tree.leaves()) == [1, 1]


def test_depth_bound(rng):
    s = synthetic.random_soup(rng, 10_000, spread=10.0, size=0.1)
    tree = AabbTree(s)
    assert tree.depth() <= 2 * math.ceil(math.log2(10_000))
    leaves = tree.leaves()
    assert all(len(x) <= spatial.LEAF_SIZE for x in leaves)
    assert sorted(np.concatenate(leaves).tolist()) == list(range(10_000))


def test_boxes_contain_faces(rng):
    s = synthetic.random_soup(rng, 300)
    tree = AabbTree(s)
    for n in range(tree.n_nodes):
        f = tree.leaf_faces[tree.node_start[n]:tree.node_start[n] + tree.node_count[n]]
        t = s.triangles[f]
        assert np.all(t.min(axis=(0, 1)) >= tree.node_lo[n])
        assert np.all(t.max(axis=(0, 1)) <= tree.node_hi[n])


def test_deterministic_rebuild(rng):
    s = synthetic.random_soup(rng, 200)
    a, b = AabbTree(s), AabbTree(s)
    np.testing.assert_array_equal(a.leaf_faces, b.leaf_faces)
    np.testing.assert_array_equal(a.node_lo, b.node_lo)


def test_above_vertex(single_face):
    r = spatial.closest_point(spatial.build(single_face), [0, 0, 2])
    assert r.dist == 2.0 and r.face == 0
    np.testing.assert_array_equal(r.footpoint, [0, 0, 0])


def test_on_surface(single_face):
    r = AabbTree(single_face).closest_point([0.2, 0.3, 0.0])
    assert r.dist == pytest.approx(0, abs=1e-15)
    np.testing.assert_allclose(r.footpoint, [0.2, 0.3, 0.0])


@pytest.mark.parametrize("backend", BACKENDS)
def test_matches_linear_scan(rng, backend):
    s = synthetic.random_soup(rng, 100)
    tree = AabbTree(s, backend=backend)
    pts = rng.normal(size=(100, 3)) * 2
    for p in pts:
        r = tree.closest_point(p)
        ref = min((geometry.closest_point_on_triangle(p, t)[1], i) for i, t in enumerate(s.triangles))
        assert r.dist == ref[0]
        b = oracle.brute_force_distance(p, s, backend=backend)
        assert (r.dist, r.face) == (b.dist, b.face)
        np.testing.assert_array_equal(r.footpoint, b.footpoint)


def test_tie_lowest_index():
    # faces 0 and 1 are the same triangle; 1 also duplicated as 3
    t = [[0, 0, 0], [1, 0, 0], [0, 1, 0]]
    far = [[5, 5, 5], [6, 5, 5], [5, 6, 5]]
    s = TriangleSoup(far + t + far + t, [[0, 1, 2], [3, 4, 5], [6, 7, 8], [9, 10, 11]])
    for p in ([0.2, 0.2, 1.0], [-1, -1, 0], [0.2, 0.2, -3.0]):
        assert AabbTree(s).closest_point(p).face == 1
        assert oracle.brute_force_distance(p, s).face == 1


def test_batched_equals_single(rng):
    s = synthetic.icosphere(2)
    tree = AabbTree(s)
    pts = rng.normal(size=(50, 3))
    d, q, f = tree.closest_points(pts)
    for i, p in enumerate(pts):
        r = tree.closest_point(p)
        assert (d[i], f[i]) == (r.dist, r.face)
        np.testing.assert_array_equal(q[i], r.footpoint)
    assert tree.kernel.max_distance(pts) == d.max()


def test_unknown_backend(single_face):
    with pytest.raises(ValueError):
        AabbTree(single_face, backend="fortran")
