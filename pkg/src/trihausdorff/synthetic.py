"""Deterministic test scenes: cubes, icospheres, decimations, random soups."""
from __future__ import annotations

import numpy as np

from .mesh import TriangleSoup

_CUBE_V = np.array([
    [0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0],
    [0, 0, 1], [1, 0, 1], [1, 1, 1], [0, 1, 1],
], dtype=float)

# outward-oriented, two triangles per side
_CUBE_F = np.array([
    [0, 2, 1], [0, 3, 2],
    [4, 5, 6], [4, 6, 7],
    [0, 1, 5], [0, 5, 4],
    [2, 3, 7], [2, 7, 6],
    [1, 2, 6], [1, 6, 5],
    [0, 4, 7], [0, 7, 3],
])


def unit_cube(offset=(0.0, 0.0, 0.0)) -> TriangleSoup:
    """The cube ``[0, 1]^3`` as 12 triangles, optionally translated."""
    return TriangleSoup(_CUBE_V + np.asarray(offset, dtype=float), _CUBE_F)


def icosphere(level: int = 1, radius: float = 1.0) -> TriangleSoup:
    """Icosahedron refined ``level`` times by 1:4 splits, projected to the sphere.

    Face counts are ``20 * 4**level`` (80 at level 1, 320 at level 2).
    """
    t = (1.0 + 5.0 ** 0.5) / 2.0
    verts = [
        [-1, t, 0], [1, t, 0], [-1, -t, 0], [1, -t, 0],
        [0, -1, t], [0, 1, t], [0, -1, -t], [0, 1, -t],
        [t, 0, -1], [t, 0, 1], [-t, 0, -1], [-t, 0, 1],
    ]
    faces = [
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ]
    verts = [list(np.asarray(v, dtype=float) / np.linalg.norm(v)) for v in verts]
    for _ in range(level):
        cache = {}

        def mid(a, b):
            key = (min(a, b), max(a, b))
            if key not in cache:
                m = (np.asarray(verts[a]) + np.asarray(verts[b])) / 2.0
                verts.append(list(m / np.linalg.norm(m)))
                cache[key] = len(verts) - 1
            return cache[key]

        new = []
        for a, b, c in faces:
            ab, bc, ca = mid(a, b), mid(b, c), mid(c, a)
            new += [[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]
        faces = new
    return TriangleSoup(radius * np.asarray(verts), np.asarray(faces))


def jitter(soup: TriangleSoup, scale: float, seed: int) -> TriangleSoup:
    """Move every vertex by a seeded Gaussian offset with std ``scale``."""
    rng = np.random.default_rng(seed)
    return TriangleSoup(soup.vertices + scale * rng.standard_normal(soup.vertices.shape),
                        soup.faces)


def decimate_longest_edge(soup: TriangleSoup, target_faces: int) -> TriangleSoup:
    """Collapse long edges to their midpoints until ``target_faces`` remain.

    Each pass visits edges longest first (ties to the smaller index pair)
    and collapses those whose endpoints are untouched so far in the pass and
    whose two endpoints share exactly two neighbours, which keeps a closed
    manifold closed and manifold. Edges at already merged vertices are used
    only once no other edge qualifies, so no region collapses repeatedly.
    """
    v = soup.vertices.copy()
    f = soup.faces.copy()
    merged = set()
    allow_merged = False
    while len(f) > target_faces:
        e = np.concatenate([f[:, [0, 1]], f[:, [1, 2]], f[:, [2, 0]]])
        e = np.unique(np.sort(e, axis=1), axis=0)
        length = np.linalg.norm(v[e[:, 0]] - v[e[:, 1]], axis=1)
        nbrs = {}
        for x, y in e.tolist():
            nbrs.setdefault(x, set()).add(y)
            nbrs.setdefault(y, set()).add(x)
        touched = set()
        collapsed = False
        for k in np.argsort(-length, kind="stable"):
            a, b = e[k].tolist()
            if a in touched or b in touched or len(nbrs[a] & nbrs[b]) != 2:
                continue
            if not allow_merged and (a in merged or b in merged):
                continue
            touched.update(nbrs[a] | nbrs[b] | {a, b})
            merged.add(a)
            v[a] = (v[a] + v[b]) / 2.0
            f = np.where(f == b, a, f)
            f = f[(f[:, 0] != f[:, 1]) & (f[:, 1] != f[:, 2]) & (f[:, 2] != f[:, 0])]
            collapsed = True
            if len(f) <= target_faces:
                break
        if not collapsed:
            if allow_merged:
                break
            allow_merged = True
    used, inverse = np.unique(f.ravel(), return_inverse=True)
    return TriangleSoup(v[used], inverse.reshape(-1, 3))


def decimation_pair(seed: int, level: int = 1, noise: float = 0.02) -> tuple[TriangleSoup, TriangleSoup]:
    """A jittered icosphere and its 2:1 longest-edge decimation."""
    a = jitter(icosphere(level), noise, seed)
    return a, decimate_longest_edge(a, a.n_faces // 2)


def random_soup(rng: np.random.Generator, n_faces: int, spread: float = 1.0,
                size: float = 0.5) -> TriangleSoup:
    """Independent random triangles: centres in a cube, vertices around each centre."""
    centres = spread * rng.uniform(-1.0, 1.0, size=(n_faces, 1, 3))
    tris = centres + size * rng.standard_normal((n_faces, 3, 3))
    return TriangleSoup(tris.reshape(-1, 3), np.arange(3 * n_faces).reshape(-1, 3))


def random_welded(rng: np.random.Generator, n_faces: int, n_vertices: int | None = None,
                  spread: float = 1.0) -> TriangleSoup:
    """Random faces over a shared vertex pool, so some faces share edges."""
    n_vertices = n_vertices or max(3, n_faces // 2 + 2)
    verts = spread * rng.uniform(-1.0, 1.0, size=(n_vertices, 3))
    faces = np.array([rng.choice(n_vertices, 3, replace=False) for _ in range(n_faces)])
    used, inverse = np.unique(faces.ravel(), return_inverse=True)
    return TriangleSoup(verts[used], inverse.reshape(-1, 3))


def needle_scene() -> tuple[TriangleSoup, TriangleSoup]:
    """A long thin triangle over two small triangles under its ends.

    Vertex footpoints fall near the two ends, so every point of the needle's
    middle is far from all of them while the true distance stays moderate.
    The right triangle sits lower, which moves the farthest point of the
    needle off every dyadic midpoint.
    """
    a = TriangleSoup([[-5.0, 0.0, 1.0], [5.0, -0.005, 1.0], [5.0, 0.005, 1.0]], [[0, 1, 2]])
    b = TriangleSoup(
        [[-5.5, -0.5, 0.0], [-4.5, 0.0, 0.0], [-5.5, 0.5, 0.0],
         [5.5, -0.5, -0.5], [4.5, 0.0, -0.5], [5.5, 0.5, -0.5]],
        [[0, 1, 2], [3, 5, 4]],
    )
    return a, b


def with_far_vertex(soup: TriangleSoup, point=(100.0, 100.0, 100.0)) -> TriangleSoup:
    """Append one vertex that no face references."""
    return TriangleSoup(np.vstack([soup.vertices, np.asarray(point, dtype=float)]), soup.faces)
