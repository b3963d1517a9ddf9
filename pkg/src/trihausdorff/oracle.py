"""Reference computations used to check the solver.

:func:`sampled_lower_bound` is the classic sampling estimate (a valid lower
bound on ``h(A, B)``), :func:`brute_force_distance` scans every face of ``B``,
and :func:`point_soup_distance` is a vectorised numpy implementation that
shares no code with the kernels.
"""
from __future__ import annotations

import math
import weakref
from dataclasses import dataclass

import numpy as np

from .mesh import TriangleSoup
from .spatial import AabbTree, ClosestPointResult

# R2 sequence generator: the plastic number
_PHI2 = 1.32471795724474602596
_ALPHA = np.array([1.0 / _PHI2, 1.0 / (_PHI2 * _PHI2)])


@dataclass(frozen=True)
class SampleSpec:
    """Either a fixed count per face or a total split by area (at least one each)."""

    samples_per_face: int | None = None
    total_samples: int | None = None
    seed: int = 0

    def __post_init__(self):
        if (self.samples_per_face is None) == (self.total_samples is None):
            raise ValueError("give exactly one of samples_per_face and total_samples")
        n = self.samples_per_face if self.samples_per_face is not None else self.total_samples
        if n < 1:
            raise ValueError("sample counts must be positive")

    def counts(self, soup: TriangleSoup) -> np.ndarray:
        if self.samples_per_face is not None:
            return np.full(soup.n_faces, self.samples_per_face, dtype=np.int64)
        t = soup.triangles
        area = 0.5 * np.linalg.norm(np.cross(t[:, 1] - t[:, 0], t[:, 2] - t[:, 0]), axis=1)
        total = area.sum()
        if total == 0.0:
            share = np.full(soup.n_faces, self.total_samples / soup.n_faces)
        else:
            share = self.total_samples * area / total
        return np.maximum(1, np.ceil(share)).astype(np.int64)


def sample_points(soup: TriangleSoup, spec: SampleSpec) -> np.ndarray:
    """Low-discrepancy barycentric samples on every face.

    Each face uses a rotated R2 sequence folded into the triangle, with a
    per-face rotation drawn from ``spec.seed``. The first ``n`` samples of a
    face do not depend on how many more are requested, so raising a count
    only adds points.
    """
    counts = spec.counts(soup)
    rng = np.random.default_rng(spec.seed)
    shift = rng.random((soup.n_faces, 2))
    face = np.repeat(np.arange(soup.n_faces), counts)
    start = np.cumsum(counts) - counts
    k = np.arange(len(face)) - np.repeat(start, counts)
    uv = np.mod(shift[face] + (k[:, None] + 1.0) * _ALPHA, 1.0)
    flip = uv.sum(axis=1) > 1.0
    uv[flip] = 1.0 - uv[flip]
    t = soup.triangles[face]
    return t[:, 0] + uv[:, :1] * (t[:, 1] - t[:, 0]) + uv[:, 1:] * (t[:, 2] - t[:, 0])


def sampled_lower_bound(A: TriangleSoup, B: TriangleSoup | AabbTree, spec: SampleSpec,
                        backend: str | None = None, chunk: int = 1 << 18) -> float:
    """``max_{p in P} d(p, B)`` over the samples ``P`` of ``A``; never exceeds ``h(A, B)``."""
    tree = B if isinstance(B, AabbTree) else AabbTree(B, backend=backend)
    pts = sample_points(A, spec)
    best = 0.0
    for i in range(0, len(pts), chunk):
        best = max(best, tree.kernel.max_distance(pts[i:i + chunk]))
    return best


_linear = weakref.WeakKeyDictionary()


def brute_force_distance(p, B: TriangleSoup, backend: str | None = None) -> ClosestPointResult:
    """Closest point by scanning every face; the lowest face index wins ties."""
    key = (backend or "")
    cache = _linear.setdefault(B, {})
    if key not in cache:
        cache[key] = AabbTree(B, backend=backend).kernel
    x, y, z = np.asarray(p, dtype=float).tolist()
    d, qx, qy, qz, f = cache[key].closest_linear(x, y, z)
    return ClosestPointResult(d, np.array([qx, qy, qz]), int(f))


def _segment_dist2(p, a, b):
    ab = b - a
    den = np.einsum("...k,...k->...", ab, ab)
    t = np.einsum("...k,...k->...", p - a, ab) / np.where(den > 0, den, 1.0)
    t = np.clip(np.where(den > 0, t, 0.0), 0.0, 1.0)
    r = p - (a + t[..., None] * ab)
    return np.einsum("...k,...k->...", r, r)


def point_soup_distance(points, B: TriangleSoup, block: int = 4096) -> np.ndarray:
    """Distance from each point to ``B`` by projection onto each face plane
    plus the three edge distances; plain numpy, no kernels."""
    pts = np.asarray(points, dtype=float).reshape(-1, 3)
    tri = B.triangles
    a, b, c = tri[:, 0], tri[:, 1], tri[:, 2]
    n = np.cross(b - a, c - a)
    nn = np.linalg.norm(n, axis=1)
    ok = nn > 0
    unit = np.where(ok[:, None], n / np.where(ok, nn, 1.0)[:, None], 0.0)
    out = np.empty(len(pts))
    for s in range(0, len(pts), block):
        p = pts[s:s + block, None, :]
        h = np.einsum("pfk,fk->pf", p - a, unit)
        proj = p - h[..., None] * unit
        # inside test: same orientation for the three sub-triangles
        c1 = np.einsum("pfk,fk->pf", np.cross(b - a, proj - a), unit)
        c2 = np.einsum("pfk,fk->pf", np.cross(c - b, proj - b), unit)
        c3 = np.einsum("pfk,fk->pf", np.cross(a - c, proj - c), unit)
        inside = ok & (c1 >= 0) & (c2 >= 0) & (c3 >= 0)
        d2 = np.where(inside, h * h, np.inf)
        d2 = np.minimum(d2, _segment_dist2(p, a, b))
        d2 = np.minimum(d2, _segment_dist2(p, b, c))
        d2 = np.minimum(d2, _segment_dist2(p, c, a))
        out[s:s + block] = np.sqrt(d2.min(axis=1))
    return out


def sampled_max_distance(t, B: TriangleSoup, n: int = 10_000, seed: int = 0) -> float:
    """Sampled ``max_{x in t} d(x, B)`` for a single triangle via :func:`point_soup_distance`.

    Samples are the corners, a barycentric lattice and random points.
    """
    t = np.asarray(t, dtype=float).reshape(3, 3)
    m = max(2, int(math.sqrt(n)))
    i, j = np.meshgrid(np.arange(m + 1), np.arange(m + 1), indexing="ij")
    keep = i + j <= m
    uv = np.stack([i[keep], j[keep]], axis=1) / m
    rest = max(0, n - len(uv))
    if rest:
        r = np.random.default_rng(seed).random((rest, 2))
        flip = r.sum(axis=1) > 1
        r[flip] = 1 - r[flip]
        uv = np.vstack([uv, r])
    pts = t[0] + uv[:, :1] * (t[1] - t[0]) + uv[:, 1:] * (t[2] - t[0])
    return float(point_soup_distance(pts, B).max())
