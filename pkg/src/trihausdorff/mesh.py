"""Triangle soup container and the checks the solver relies on."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np


class MeshError(ValueError):
    """Base class for invalid mesh input."""


class IndexOutOfRange(MeshError):
    pass


class EmptyFaceList(MeshError):
    pass


class UnreferencedVertices(MeshError):
    pass


class DegenerateBBox(MeshError):
    pass


class Policy(enum.Enum):
    """What :func:`validate` does with vertices no face uses."""

    REJECT = "reject"
    STRIP_UNREFERENCED = "strip"
    KEEP = "keep"


@dataclass(frozen=True, eq=False)
class TriangleSoup:
    """Vertices ``(m, 3)`` and faces ``(n, 3)``; read-only after construction.

    No manifoldness, orientation or welding is assumed. Faces may repeat
    vertex indices (zero-area triangles).
    """

    vertices: np.ndarray
    faces: np.ndarray
    has_unreferenced: bool = field(init=False)

    def __post_init__(self):
        v = np.array(self.vertices, dtype=np.float64, copy=True).reshape(-1, 3)
        f = np.array(self.faces, dtype=np.int64, copy=True)
        if f.size == 0:
            raise EmptyFaceList("triangle soup has no faces")
        f = f.reshape(-1, 3)
        if not np.all(np.isfinite(v)):
            raise MeshError("vertex coordinates must be finite")
        if f.min() < 0 or f.max() >= len(v):
            bad = int(np.flatnonzero((f < 0).any(axis=1) | (f >= len(v)).any(axis=1))[0])
            raise IndexOutOfRange(
                f"face {bad} {f[bad].tolist()} indexes outside [0, {len(v)})")
        v.setflags(write=False)
        f.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "faces", f)
        used = np.zeros(len(v), dtype=bool)
        used[f.ravel()] = True
        object.__setattr__(self, "has_unreferenced", not bool(used.all()))

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_faces(self) -> int:
        return len(self.faces)

    @cached_property
    def triangles(self) -> np.ndarray:
        """Per-face vertex coordinates, shape ``(n, 3, 3)``."""
        t = self.vertices[self.faces]
        t.setflags(write=False)
        return t

    @cached_property
    def flat_triangles(self) -> np.ndarray:
        """Contiguous ``(n, 9)`` copy of :attr:`triangles` for the kernels."""
        t = np.ascontiguousarray(self.triangles.reshape(-1, 9))
        t.setflags(write=False)
        return t

    def translated(self, offset) -> TriangleSoup:
        return TriangleSoup(self.vertices + np.asarray(offset, dtype=float), self.faces)

    def __repr__(self) -> str:
        return f"TriangleSoup(n_vertices={self.n_vertices}, n_faces={self.n_faces})"


def validate(soup: TriangleSoup, policy: Policy | str = Policy.KEEP) -> TriangleSoup:
    """Apply ``policy`` to unreferenced vertices.

    ``KEEP`` returns the soup unchanged (its ``has_unreferenced`` flag tells
    the story), ``STRIP_UNREFERENCED`` drops them and reindexes faces, and
    ``REJECT`` raises :class:`UnreferencedVertices`.
    """
    policy = Policy(policy)
    if not soup.has_unreferenced or policy is Policy.KEEP:
        return soup
    if policy is Policy.REJECT:
        used = np.zeros(soup.n_vertices, dtype=bool)
        used[soup.faces.ravel()] = True
        raise UnreferencedVertices(
            f"{int((~used).sum())} of {soup.n_vertices} vertices are not used by any face")
    keep, inverse = np.unique(soup.faces.ravel(), return_inverse=True)
    return TriangleSoup(soup.vertices[keep], inverse.reshape(-1, 3))


@dataclass(frozen=True)
class BBoxDiag:
    min: np.ndarray
    max: np.ndarray
    diag: float


def bbox_diag(soup: TriangleSoup) -> BBoxDiag:
    """Axis-aligned bounding box of all stored vertices and its diagonal length."""
    lo = soup.vertices.min(axis=0)
    hi = soup.vertices.max(axis=0)
    diag = float(np.linalg.norm(hi - lo))
    if diag == 0.0:
        raise DegenerateBBox("all vertices coincide; relative tolerance is undefined")
    return BBoxDiag(lo, hi, diag)


def faces_share_edge(soup: TriangleSoup, f1: int, f2: int) -> bool:
    """Index-based adjacency: at least two vertex indices in common.

    Unwelded soups (duplicated vertices along an edge) report ``False``.
    """
    a = set(soup.faces[f1].tolist())
    b = set(soup.faces[f2].tolist())
    return len(a & b) >= 2
