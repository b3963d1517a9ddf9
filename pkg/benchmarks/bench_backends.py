"""Compare the compiled and pure-Python kernel backends.

    python3 benchmarks/bench_backends.py [--repeat 3] [--quick]

Reports the best of ``--repeat`` runs for closest-point queries, single
cascade evaluations and complete solves, plus the speedup of the compiled
backend. Both backends must return identical numbers; the script checks it.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from trihausdorff import _backend, synthetic
from trihausdorff.solver import SolverConfig, solve
from trihausdorff.spatial import AabbTree


def best_of(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def queries(backend, soup, pts):
    tree = AabbTree(soup, backend=backend)
    return lambda: tree.closest_points(pts)[0]


def cascades(backend, soup, tris):
    tree = AabbTree(soup, backend=backend)
    k = tree.kernel
    packed = []
    for t in tris:
        v = tuple(t.ravel().tolist())
        rs = [k.closest(*t[i]) for i in range(3)]
        q = tuple(c for r in rs for c in r[1:4])
        packed.append((v, q, tuple(r[0] for r in rs), tuple(r[4] for r in rs)))
    return lambda: [k.cascade(v, q, d, f, 0.0, (1, 2, 3, 4)) for v, q, d, f in packed]


def solves(backend, a, b):
    return lambda: (lambda r: (r.lower, r.upper, r.stats.subdivisions))(
        solve(a, b, SolverConfig(), backend=backend))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--quick", action="store_true", help="smaller workloads")
    args = ap.parse_args(argv)

    names = _backend.available()
    if "cython" not in names:
        print("compiled backend not built; only the Python timings are shown")
    rng = np.random.default_rng(7)
    n_pts = 2_000 if args.quick else 20_000
    sphere = synthetic.icosphere(3)
    pts = rng.normal(size=(n_pts, 3)) * 1.5
    tris = rng.normal(size=(500 if args.quick else 5_000, 3, 3))
    cube_a, cube_b = synthetic.unit_cube(), synthetic.unit_cube((2.0, 0.0, 0.0))
    dec_a, dec_b = synthetic.decimation_pair(0)

    cases = [
        (f"closest point, {n_pts} queries on {sphere.n_faces} faces", lambda be: queries(be, sphere, pts)),
        (f"cascade 1234, {len(tris)} triangles", lambda be: cascades(be, sphere, tris)),
        ("solve, icosphere vs decimation", lambda be: solves(be, dec_a, dec_b)),
    ]
    if not args.quick:
        cases.append(("solve, cube vs shifted cube", lambda be: solves(be, cube_a, cube_b)))

    print(f"{'workload':<48}" + "".join(f"{n:>12}" for n in names) + f"{'speedup':>10}")
    for label, make in cases:
        times = {}
        results = {}
        for be in names:
            times[be], results[be] = best_of(make(be), args.repeat)
        same = all(_equal(results[names[0]], results[n]) for n in names)
        row = f"{label:<48}" + "".join(f"{times[n]:>11.4f}s" for n in names)
        if len(names) > 1:
            row += f"{times['python'] / times['cython']:>9.1f}x"
        if not same:
            row += "  MISMATCH"
        print(row)


def _equal(x, y):
    if isinstance(x, np.ndarray):
        return np.array_equal(x, y)
    return x == y


if __name__ == "__main__":
    main()
