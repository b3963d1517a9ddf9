"""Bound-ordering sweep: every ordering of a subset of {u1, u2, u3, u4} on every pair."""
from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence, TextIO

from .bounds import Bound, BoundCascadeConfig
from .mesh import TriangleSoup
from .solver import SolverConfig, Status, solve
from .spatial import AabbTree

SHARED_WIN_FACTOR = 1.05

COLUMNS = ("pair_id", "order", "status", "wall_time_s", "faces_processed", "lower", "upper")


def all_orderings(bounds: Sequence[Bound] = (Bound.U1, Bound.U2, Bound.U3, Bound.U4)
                  ) -> list[BoundCascadeConfig]:
    """Non-empty duplicate-free sequences, shortest first (64 for four bounds)."""
    out = []
    for k in range(1, len(bounds) + 1):
        for perm in itertools.permutations(bounds, k):
            out.append(BoundCascadeConfig(perm))
    return out


@dataclass(frozen=True)
class SweepRow:
    pair_id: str
    order: str
    status: str
    wall_time_s: float
    faces_processed: int
    lower: float
    upper: float

    @property
    def converged(self) -> bool:
        return self.status == Status.CONVERGED.value


def read_manifest(path) -> list[tuple[Path, Path]]:
    """``pathA,pathB`` per line, ``#`` comments; relative paths resolve against the manifest."""
    path = Path(path)
    pairs = []
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 2 or not all(parts):
            raise ValueError(f"{path}: line {lineno}: expected 'pathA,pathB'")
        pairs.append(tuple(p if Path(p).is_absolute() else path.parent / p for p in map(Path, parts)))
    return pairs


def error_rows(pair_id: str, exc: BaseException,
               orderings: Sequence[BoundCascadeConfig] | None = None) -> list[SweepRow]:
    orderings = all_orderings() if orderings is None else orderings
    return [SweepRow(pair_id, o.to_string(), f"Error: {exc}", 0.0, 0, float("nan"), float("nan"))
            for o in orderings]


def sweep(pairs: Iterable[tuple[str, TriangleSoup, TriangleSoup]],
          orderings: Sequence[BoundCascadeConfig] | None = None,
          epsilon: float = 1e-8, max_factor: float = 1e7,
          time_limit: float | None = None, backend: str | None = None) -> list[SweepRow]:
    """Run every ordering on every ``(pair_id, A, B)``; one row per run.

    Runs are sequential so timings are uncontended. A failing pair yields
    rows with status ``Error`` instead of stopping the sweep.
    """
    orderings = all_orderings() if orderings is None else orderings
    rows = []
    for pair_id, a, b in pairs:
        try:
            tree = AabbTree(b, backend=backend)
        except Exception as exc:  # noqa: BLE001 - recorded, sweep continues
            rows += error_rows(pair_id, exc, orderings)
            continue
        for o in orderings:
            cfg = SolverConfig(epsilon=epsilon, max_factor=max_factor, cascade=o,
                               time_limit=time_limit)
            try:
                r = solve(a, tree, cfg)
            except Exception as exc:  # noqa: BLE001
                rows += error_rows(pair_id, exc, [o])
                continue
            rows.append(SweepRow(pair_id, o.to_string(), str(r.status), r.stats.wall_time_s,
                                 r.stats.faces_processed, r.lower, r.upper))
    return rows


def shared_wins(rows: Sequence[SweepRow], factor: float = SHARED_WIN_FACTOR) -> dict[str, float]:
    """Percentage of pairs on which each ordering converged within ``factor``
    times the fastest converged ordering. Pairs where nothing converged are
    left out."""
    orders = list(dict.fromkeys(r.order for r in rows))
    by_pair = {}
    for r in rows:
        by_pair.setdefault(r.pair_id, []).append(r)
    wins = dict.fromkeys(orders, 0)
    counted = 0
    for pair_rows in by_pair.values():
        times = [r.wall_time_s for r in pair_rows if r.converged]
        if not times:
            continue
        counted += 1
        limit = factor * min(times)
        for r in pair_rows:
            if r.converged and r.wall_time_s <= limit:
                wins[r.order] += 1
    return {o: (100.0 * w / counted if counted else 0.0) for o, w in wins.items()}


def convergence_counts(rows: Sequence[SweepRow]) -> dict[str, int]:
    counts = {}
    for r in rows:
        counts[r.order] = counts.get(r.order, 0) + int(r.converged)
    return counts


def write_csv(rows: Sequence[SweepRow], out: TextIO) -> None:
    """Per-run rows, a blank line, then ``order,shared_win_pct,converged_pairs``."""
    w = csv.writer(out, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in rows:
        w.writerow([r.pair_id, r.order, r.status, "%.6f" % r.wall_time_s, r.faces_processed,
                    "%.17g" % r.lower, "%.17g" % r.upper])
    out.write("\n")
    wins = shared_wins(rows)
    conv = convergence_counts(rows)
    w.writerow(("order", "shared_win_pct", "converged_pairs"))
    for o in wins:
        w.writerow([o, "%.2f" % wins[o], conv[o]])
