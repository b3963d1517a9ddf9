"""Upper bounds on the distance from a triangle of ``A`` to the soup ``B``.

Every bound takes the triangle ``t`` together with the closest-point queries
of its three vertices (a :class:`VertexQuery` triple) and returns a value no
smaller than ``max_{p in t} d(p, B)``. The arithmetic lives in the kernel
backends; this module is the typed surface over them.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _pykernels
from .mesh import TriangleSoup
from .spatial import AabbTree, ClosestPointResult


class Bound(enum.IntEnum):
    EXACT = 0
    U1 = 1
    U2 = 2
    U3 = 3
    U4 = 4
    ZHENG = 5

    @property
    def label(self) -> str:
        return self.name.lower()


_CHARS = {"1": Bound.U1, "2": Bound.U2, "3": Bound.U3, "4": Bound.U4, "z": Bound.ZHENG}

BOUND_LABELS = tuple(b.label for b in Bound)


@dataclass(frozen=True)
class VertexQuery:
    vertex: np.ndarray
    result: ClosestPointResult

    @property
    def dist(self) -> float:
        return self.result.dist


@dataclass(frozen=True)
class BoundCascadeConfig:
    """Ordered, duplicate-free selection of bounds tried after the exact case."""

    order: tuple[Bound, ...] = (Bound.U1, Bound.U2, Bound.U3, Bound.U4)

    def __post_init__(self):
        order = tuple(Bound(b) for b in self.order)
        if not order:
            raise ValueError("cascade order must not be empty")
        if len(set(order)) != len(order):
            raise ValueError(f"cascade order has repeats: {order}")
        if Bound.EXACT in order:
            raise ValueError("the exact case is always tried first; do not list it")
        object.__setattr__(self, "order", order)

    @classmethod
    def from_string(cls, s: str) -> BoundCascadeConfig:
        """Parse strings such as ``"1234"`` or ``"21z"``."""
        try:
            order = tuple(_CHARS[c] for c in s.strip().lower())
        except KeyError as exc:
            raise ValueError(f"invalid bound {exc.args[0]!r} in order {s!r}; "
                             f"use characters from '1234z'") from None
        return cls(order)

    def to_string(self) -> str:
        inv = {v: k for k, v in _CHARS.items()}
        return "".join(inv[b] for b in self.order)

    @property
    def codes(self) -> tuple[int, ...]:
        return tuple(int(b) for b in self.order)


DEFAULT_CASCADE = BoundCascadeConfig()


@dataclass(frozen=True)
class BoundOutcome:
    value: float
    discard: bool
    exact: bool
    terminated_by: Bound
    bounds_evaluated: tuple[Bound, ...]


def _kernel(b):
    if isinstance(b, AabbTree):
        return b.kernel
    if isinstance(b, TriangleSoup):
        return AabbTree(b).kernel
    return b


def _pack(t, vq: Sequence[VertexQuery]):
    t = np.asarray(t, dtype=float).reshape(3, 3)
    if len(vq) != 3:
        raise ValueError("need one query per triangle vertex")
    v = tuple(t.ravel().tolist())
    q = tuple(float(c) for r in vq for c in r.result.footpoint)
    d = tuple(float(r.result.dist) for r in vq)
    f = tuple(int(r.result.face) for r in vq)
    return v, q, d, f


def query_vertices(t, tree: AabbTree) -> list[VertexQuery]:
    """Closest-point queries for the three vertices of ``t``."""
    t = np.asarray(t, dtype=float).reshape(3, 3)
    return [VertexQuery(v, tree.closest_point(v)) for v in t]


def exact_case(vq: Sequence[VertexQuery], b=None, t=None) -> float | None:
    """Exact ``h(T, B)`` when all three footpoints lie on one face of ``B``.

    Without ``b`` only the reported face indices are compared. With ``b``
    (a soup, tree or kernel) a footpoint also counts as lying on another
    footpoint face when its distance to it is zero, which catches ties at
    shared vertices and edges.
    """
    if b is None:
        faces = {r.result.face for r in vq}
        if len(faces) == 1:
            return max(r.result.dist for r in vq)
        return None
    v = np.zeros(9) if t is None else t
    return _kernel(b).exact(*_pack(v, vq))


def bound_u1(t, vq, b=None) -> float:
    """Longest edge at a vertex plus that vertex's distance, minimised over vertices."""
    v, q, d, f = _pack(t, vq)
    if b is None:
        return _pykernels.u1(v, d)
    return _kernel(b).u1(v, q, d, f)


def bound_u2(t, vq, b=None) -> float:
    """Covering radius of ``t`` plus the largest vertex distance."""
    v, q, d, f = _pack(t, vq)
    if b is None:
        from .geometry import triangle_g
        return triangle_g(t) + max(d)
    return _kernel(b).u2(v, q, d, f)


def bound_u3(t, vq, b) -> float:
    """Split ``t`` by footpoint face and bound each piece against its own face.

    Two footpoint faces sharing an edge: split by the bisector of their
    supporting planes into a triangle and a quadrilateral. Otherwise: three
    quadrilaterals around the barycentre, also compared with the whole
    triangle against each single face.
    """
    return _kernel(b).u3(*_pack(t, vq))


def bound_u4(t, vq, b=None) -> float:
    """Distance from ``t`` to pairs of footpoints, via the pair's bisector plane."""
    v, q, d, f = _pack(t, vq)
    if b is None:
        return _pykernels.u4(v, q)
    return _kernel(b).u4(v, q, d, f)


def bound_zheng(t, vq, b) -> float:
    """Best single-face bound among the vertex faces and the barycentre's face."""
    return _kernel(b).zheng(*_pack(t, vq))


def cascade(t, vq, b, lower: float, cfg: BoundCascadeConfig = DEFAULT_CASCADE) -> BoundOutcome:
    """Evaluate bounds in ``cfg.order`` until one falls below ``lower``.

    If none does, the outcome carries the minimum of all evaluated bounds.
    """
    value, code, exact, discard, n = _kernel(b).cascade(*_pack(t, vq), float(lower), cfg.codes)
    return BoundOutcome(float(value), bool(discard), bool(exact), Bound(code), cfg.order[:n])
