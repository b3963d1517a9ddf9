"""Axis-aligned bounding box hierarchy over a triangle soup."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _backend
from .mesh import EmptyFaceList, TriangleSoup

LEAF_SIZE = 4


@dataclass(frozen=True)
class ClosestPointResult:
    dist: float
    footpoint: np.ndarray
    face: int


class AabbTree:
    """Exact closest-point queries against ``soup``.

    Built top-down by splitting each node's faces at the median centroid along
    the longest axis of the centroid bounds (stable order, so rebuilding gives
    an identical tree); leaves hold at most :data:`LEAF_SIZE` faces.

    Nodes are stored flat: ``node_left[i] < 0`` marks a leaf whose faces are
    ``leaf_faces[node_start[i]:node_start[i] + node_count[i]]``.
    """

    def __init__(self, soup: TriangleSoup, backend: str | None = None):
        if soup.n_faces == 0:
            raise EmptyFaceList("cannot build a tree over an empty mesh")
        self.soup = soup
        tris = soup.triangles
        lo_f = tris.min(axis=1)
        hi_f = tris.max(axis=1)
        cen = tris.mean(axis=1)

        lo, hi, left, right, start, count = [], [], [], [], [], []
        order = np.arange(soup.n_faces)
        # (node id, first, last) ranges into ``order``; ids assigned in push order
        lo.append(None)
        hi.append(None)
        left.append(-1)
        right.append(-1)
        start.append(0)
        count.append(soup.n_faces)
        todo = [(0, 0, soup.n_faces)]
        while todo:
            node, a, b = todo.pop()
            idx = order[a:b]
            lo[node] = lo_f[idx].min(axis=0)
            hi[node] = hi_f[idx].max(axis=0)
            start[node] = a
            count[node] = b - a
            if b - a <= LEAF_SIZE:
                continue
            c = cen[idx]
            axis = int(np.argmax(c.max(axis=0) - c.min(axis=0)))
            order[a:b] = idx[np.argsort(c[:, axis], kind="stable")]
            mid = a + (b - a) // 2
            for _ in range(2):
                lo.append(None)
                hi.append(None)
                left.append(-1)
                right.append(-1)
                start.append(0)
                count.append(0)
            ln, rn = len(left) - 2, len(left) - 1
            left[node] = ln
            right[node] = rn
            todo.append((rn, mid, b))
            todo.append((ln, a, mid))

        self.node_lo = np.array(lo)
        self.node_hi = np.array(hi)
        self.node_left = np.array(left, dtype=np.int64)
        self.node_right = np.array(right, dtype=np.int64)
        self.node_start = np.array(start, dtype=np.int64)
        self.node_count = np.array(count, dtype=np.int64)
        self.leaf_faces = order.astype(np.int64)
        self.extent = float(np.abs(soup.vertices[soup.faces.ravel()]).max())
        self.backend = _backend.get(backend)
        self.kernel = self.backend.Kernel(
            soup.flat_triangles, soup.faces, self.node_lo, self.node_hi,
            self.node_left, self.node_right, self.node_start, self.node_count,
            self.leaf_faces, self.extent,
        )

    @property
    def n_nodes(self) -> int:
        return len(self.node_left)

    def depth(self) -> int:
        """Edges on the longest root-to-leaf path."""
        best = 0
        todo = [(0, 0)]
        while todo:
            n, k = todo.pop()
            if self.node_left[n] < 0:
                best = max(best, k)
            else:
                todo.append((int(self.node_left[n]), k + 1))
                todo.append((int(self.node_right[n]), k + 1))
        return best

    def leaves(self) -> list[np.ndarray]:
        return [self.leaf_faces[self.node_start[n]:self.node_start[n] + self.node_count[n]]
                for n in range(self.n_nodes) if self.node_left[n] < 0]

    def closest_point(self, p) -> ClosestPointResult:
        x, y, z = np.asarray(p, dtype=float).tolist()
        d, qx, qy, qz, f = self.kernel.closest(x, y, z)
        return ClosestPointResult(d, np.array([qx, qy, qz]), int(f))

    def closest_points(self, points) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Batched query: ``(dists, footpoints, faces)`` arrays."""
        return self.kernel.closest_many(points)


def build(soup_b: TriangleSoup, backend: str | None = None) -> AabbTree:
    return AabbTree(soup_b, backend=backend)


def closest_point(tree: AabbTree, p) -> ClosestPointResult:
    return tree.closest_point(p)
