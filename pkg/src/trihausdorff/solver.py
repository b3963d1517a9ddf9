"""Branch-and-bound driver for the one-sided distance ``h(A, B)``.

Candidates are sub-triangles of ``A`` kept in a max-queue on their upper
bound. The lower bound ``l`` is the largest distance seen at any vertex or
midpoint, less a rounding allowance of a few ulps so that ``l`` stays below
the true value; the global upper bound is ``max(l, top of queue)``.
"""
from __future__ import annotations

import enum
import heapq
import math
import time
from dataclasses import dataclass, field

import numpy as np

from ._pykernels import LOWER_TOL
from .bounds import BOUND_LABELS, DEFAULT_CASCADE, Bound, BoundCascadeConfig
from .mesh import TriangleSoup, bbox_diag
from .spatial import AabbTree


class Status(str, enum.Enum):
    CONVERGED = "Converged"
    QUEUE_EXHAUSTED = "QueueExhausted"
    BUDGET_EXCEEDED = "BudgetExceeded"
    TIME_LIMIT = "TimeLimit"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class SolverConfig:
    epsilon: float = 1e-8
    max_factor: float = 1e7
    cascade: BoundCascadeConfig = DEFAULT_CASCADE
    time_limit: float | None = None

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if not self.max_factor >= 1:
            raise ValueError(f"max_factor must be >= 1, got {self.max_factor}")
        if self.time_limit is not None and not self.time_limit > 0:
            raise ValueError(f"time_limit must be positive, got {self.time_limit}")


@dataclass(frozen=True)
class CandidateTriangle:
    """A queued sub-triangle of ``A`` in the kernels' flat layout."""

    tri: tuple
    footpoints: tuple
    dists: tuple
    faces: tuple
    upper: float
    seq: int

    @property
    def vertices(self) -> np.ndarray:
        return np.array(self.tri).reshape(3, 3)


@dataclass
class SolverStats:
    faces_processed: int = 0
    subdivisions: int = 0
    peak_queue: int = 0
    bound_histogram: dict = field(default_factory=lambda: {k: 0 for k in BOUND_LABELS})
    wall_time_s: float = 0.0
    iterations: int = 0
    stale_dropped: int = 0
    monotonicity_violations: int = 0


@dataclass
class HausdorffReport:
    lower: float
    upper: float
    dA: float
    relative_gap: float
    status: Status
    stats: SolverStats
    trace: list | None = None
    remaining: list | None = None

    @property
    def converged(self) -> bool:
        return self.status is Status.CONVERGED

    def contains(self, value: float) -> bool:
        return self.lower <= value <= self.upper


@dataclass(frozen=True)
class SymmetricResult:
    ab: HausdorffReport
    ba: HausdorffReport
    lower: float
    upper: float


def _entry(upper, seq, v, q, d, f):
    return (-upper, seq, v, q, d, f)


def solve(A: TriangleSoup, B: TriangleSoup | AabbTree, cfg: SolverConfig = SolverConfig(),
          backend: str | None = None, trace: bool = False) -> HausdorffReport:
    """Certified interval ``[l, u]`` around ``h(A, B)``.

    ``B`` may be a prebuilt :class:`AabbTree` to reuse across runs. With
    ``trace=True`` the report carries ``(l, u)`` after every iteration and
    the queue left at termination as :class:`CandidateTriangle` objects.
    """
    t0 = time.perf_counter()
    d_a = bbox_diag(A).diag
    tree = B if isinstance(B, AabbTree) else AabbTree(B, backend=backend)
    kernel = tree.kernel
    order = cfg.cascade.codes
    eps = cfg.epsilon
    budget = cfg.max_factor * A.n_faces
    deadline = None if cfg.time_limit is None else t0 + cfg.time_limit
    stats = SolverStats()
    hist = [0] * len(Bound)
    history = [] if trace else None

    # initial pass over every stored vertex of A, referenced or not
    dist, foot, face = kernel.closest_many(A.vertices)
    mag = np.maximum(tree.extent, np.abs(A.vertices).max(axis=1))
    lower = max(0.0, float((dist - LOWER_TOL * mag).max()))
    dist_l = dist.tolist()
    foot_l = foot.tolist()
    face_l = face.tolist()
    heap = []
    seq = 0
    for v, (i, j, k) in zip(A.flat_triangles.tolist(), A.faces.tolist()):
        v = tuple(v)
        q = tuple(foot_l[i] + foot_l[j] + foot_l[k])
        d = (dist_l[i], dist_l[j], dist_l[k])
        f = (face_l[i], face_l[j], face_l[k])
        value, code, _, discard, _ = kernel.cascade(v, q, d, f, lower, order)
        hist[code] += 1
        if not discard:
            heap.append(_entry(value, seq, v, q, d, f))
            seq += 1
    heapq.heapify(heap)
    stats.faces_processed = A.n_faces
    stats.peak_queue = len(heap)

    prev_l = lower
    prev_u = math.inf
    upper = lower
    status = None
    while True:
        while heap and -heap[0][0] < lower:
            heapq.heappop(heap)
            stats.stale_dropped += 1
        if not heap:
            upper = lower
            status = Status.QUEUE_EXHAUSTED
            break
        top = -heap[0][0]
        upper = top if top > lower else lower
        if lower < prev_l or upper > prev_u:
            stats.monotonicity_violations += 1
        prev_l, prev_u = lower, upper
        if history is not None:
            history.append((lower, upper))
        if (upper - lower) / d_a <= eps:
            status = Status.CONVERGED
            break
        if stats.faces_processed > budget:
            status = Status.BUDGET_EXCEEDED
            break
        if deadline is not None and (stats.iterations & 63) == 0 and time.perf_counter() > deadline:
            status = Status.TIME_LIMIT
            break

        stats.iterations += 1
        neg, _, v, q, d, f = heapq.heappop(heap)
        parent = -neg
        lower, children = kernel.refine(v, q, d, f, lower, order)
        for cv, cq, cd, cf, value, code, _, discard, _ in children:
            hist[code] += 1
            if not discard:
                # a child's region lies inside its parent's
                heapq.heappush(heap, _entry(value if value < parent else parent,
                                            seq, cv, cq, cd, cf))
                seq += 1
        stats.subdivisions += 1
        stats.faces_processed += 4
        if len(heap) > stats.peak_queue:
            stats.peak_queue = len(heap)

    stats.bound_histogram = {BOUND_LABELS[c]: hist[c] for c in range(len(Bound))}
    stats.wall_time_s = time.perf_counter() - t0
    remaining = None
    if trace:
        remaining = [CandidateTriangle(v, q, d, f, -neg, s) for neg, s, v, q, d, f in sorted(heap)]
    return HausdorffReport(lower, upper, d_a, (upper - lower) / d_a, status, stats,
                           history, remaining)


def solve_symmetric(A: TriangleSoup, B: TriangleSoup, cfg: SolverConfig = SolverConfig(),
                    backend: str | None = None) -> SymmetricResult:
    """Two independent one-sided runs; ``H`` lies in ``[lower, upper]``."""
    ab = solve(A, B, cfg, backend=backend)
    ba = solve(B, A, cfg, backend=backend)
    return SymmetricResult(ab, ba, max(ab.lower, ba.lower), max(ab.upper, ba.upper))
