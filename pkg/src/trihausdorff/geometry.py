"""Point, plane and triangle primitives used by the bounds.

Points are length-3 float arrays (anything ``np.asarray`` accepts); triangles
are ``(3, 3)`` arrays with one vertex per row. Degenerate triangles are valid
input everywhere.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _pykernels as _ref
from ._backend import kernels as _k


@dataclass(frozen=True)
class Plane:
    """The plane ``normal . x + offset = 0``.

    ``degenerate`` marks a failed construction (coincident points, parallel
    planes); ``normal`` and ``offset`` are then meaningless.
    """

    normal: np.ndarray
    offset: float
    degenerate: bool = False

    def signed_distance(self, x) -> float:
        return float(np.dot(self.normal, np.asarray(x, dtype=float)) + self.offset)

    def as_tuple(self) -> tuple[float, float, float, float]:
        n = self.normal
        return float(n[0]), float(n[1]), float(n[2]), float(self.offset)

    @classmethod
    def from_tuple(cls, t) -> Plane:
        if t is None:
            return cls(np.full(3, np.nan), float("nan"), degenerate=True)
        return cls(np.array(t[:3], dtype=float), float(t[3]))

    @classmethod
    def through(cls, normal, point) -> Plane:
        """Plane with unit ``normal`` passing through ``point``."""
        n = np.asarray(normal, dtype=float)
        n = n / np.linalg.norm(n)
        return cls(n, -float(np.dot(n, np.asarray(point, dtype=float))))


@dataclass(frozen=True)
class SegmentPlaneHit:
    hit: bool
    point: np.ndarray | None = None
    parameter: float | None = None


_MISS = SegmentPlaneHit(False)


def _tri(t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if t.shape != (3, 3):
        raise ValueError(f"triangle must have shape (3, 3), got {t.shape}")
    return t


def closest_point_on_triangle(p, t) -> tuple[np.ndarray, float]:
    """Closest point of triangle ``t`` to ``p`` and its distance."""
    t = _tri(t)
    q, dist = _k.closest_point_on_triangle(p, t[0], t[1], t[2])
    return np.array(q), dist


def triangle_g(t) -> float:
    """Radius of a ball around the vertices covering ``t``.

    The circumradius for acute triangles and half the longest edge otherwise;
    every point of ``t`` lies within this distance of its nearest vertex.
    """
    return _k.triangle_g(*_tri(t).ravel().tolist())


def bisector_plane_of_points(q1, q2) -> Plane:
    a = np.asarray(q1, dtype=float)
    b = np.asarray(q2, dtype=float)
    return Plane.from_tuple(_ref.bisector_of_points(*a.tolist(), *b.tolist()))


def bisector_plane_of_planes(p1: Plane, p2: Plane, side_hint) -> Plane:
    """Bisector of two intersecting planes that splits the wedge holding ``side_hint``.

    Of the two bisectors, picks ``n1 - n2`` when the hint lies on the same side
    of both planes and ``n1 + n2`` otherwise. Near-parallel planes give a
    degenerate result.
    """
    if p1.degenerate or p2.degenerate:
        raise ValueError("bisector_plane_of_planes needs two valid planes")
    h = np.asarray(side_hint, dtype=float)
    return Plane.from_tuple(_ref.bisector_of_planes(p1.as_tuple(), p2.as_tuple(), *h.tolist()))


def segment_plane_intersection(a, b, pl: Plane) -> SegmentPlaneHit:
    if pl.degenerate:
        raise ValueError("segment_plane_intersection needs a valid plane")
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    res = _ref.segment_plane(*a.tolist(), *b.tolist(), pl.as_tuple())
    if res is None:
        return _MISS
    return SegmentPlaneHit(True, np.array(res[1:]), res[0])


def midpoint_subdivide(t) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Split ``t`` into four children through its edge midpoints.

    Returns ``(children, midpoints)`` with ``midpoints = [m12, m23, m31]`` and
    children ``(v1, m12, m31), (m12, v2, m23), (m31, m23, v3), (m12, m23, m31)``.
    """
    v1, v2, v3 = _tri(t)
    m1 = (v1 + v2) * 0.5
    m2 = (v2 + v3) * 0.5
    m3 = (v3 + v1) * 0.5
    children = [
        np.array([v1, m1, m3]),
        np.array([m1, v2, m2]),
        np.array([m3, m2, v3]),
        np.array([m1, m2, m3]),
    ]
    return children, [m1, m2, m3]


def triangle_area(t) -> float:
    v1, v2, v3 = _tri(t)
    return 0.5 * float(np.linalg.norm(np.cross(v2 - v1, v3 - v1)))


def triangle_diameter(t) -> float:
    v1, v2, v3 = _tri(t)
    return float(max(np.linalg.norm(v2 - v1), np.linalg.norm(v3 - v2), np.linalg.norm(v1 - v3)))
