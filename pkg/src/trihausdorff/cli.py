"""Command-line front end.

Exit codes: 0 Converged, 2 QueueExhausted, 3 BudgetExceeded, 4 TimeLimit,
1 for bad input.
"""
from __future__ import annotations

import argparse
import sys

from . import ablation, io, oracle
from .bounds import BoundCascadeConfig
from .mesh import MeshError, Policy, validate
from .solver import HausdorffReport, SolverConfig, Status, solve, solve_symmetric

EXIT_CODES = {
    Status.CONVERGED: 0,
    Status.QUEUE_EXHAUSTED: 2,
    Status.BUDGET_EXCEEDED: 3,
    Status.TIME_LIMIT: 4,
}
EXIT_INPUT_ERROR = 1


def exit_code(status: Status) -> int:
    return EXIT_CODES[Status(status)]


def _positive(kind):
    def parse(s):
        try:
            x = kind(s)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not a number: {s!r}") from None
        if not x > 0:
            raise argparse.ArgumentTypeError(f"must be positive: {s!r}")
        return x
    return parse


def _order(s):
    try:
        return BoundCascadeConfig.from_string(s)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _add_mesh_args(p):
    p.add_argument("mesh_a")
    p.add_argument("mesh_b")
    p.add_argument("--strip-unreferenced", action="store_true",
                   help="drop vertices no face uses before solving")
    p.add_argument("--fan", action="store_true",
                   help="fan-triangulate OBJ polygons instead of rejecting them")


def _add_solver_args(p):
    p.add_argument("--eps", type=_positive(float), default=1e-8,
                   help="relative tolerance on (u - l) / dA (default 1e-8)")
    p.add_argument("--max-factor", type=_positive(float), default=1e7,
                   help="face budget as a multiple of A's face count (default 1e7)")
    p.add_argument("--order", type=_order, default=BoundCascadeConfig(),
                   help="cascade order over 1,2,3,4,z (default 1234)")
    p.add_argument("--time-limit-s", type=_positive(float), default=None)
    p.add_argument("--json", action="store_true", help="print the JSON report")
    p.add_argument("--pretty", action="store_true", help="indent the JSON report")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="trihausdorff",
        description="Certified bounds on the one-sided Hausdorff distance between triangle soups.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("distance", help="bound h(A, B)")
    _add_mesh_args(p)
    _add_solver_args(p)

    p = sub.add_parser("symmetric", help="bound max(h(A, B), h(B, A))")
    _add_mesh_args(p)
    _add_solver_args(p)

    p = sub.add_parser("sample", help="sampling lower bound on h(A, B)")
    _add_mesh_args(p)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--samples", type=_positive(int), default=None,
                   help="total samples, split by face area (default 100000)")
    g.add_argument("--per-face", type=_positive(int), default=None)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("ablate", help="time every bound ordering over a manifest of pairs")
    p.add_argument("manifest", help="file with one 'pathA,pathB' per line")
    p.add_argument("--eps", type=_positive(float), default=1e-8)
    p.add_argument("--max-factor", type=_positive(float), default=1e7)
    p.add_argument("--time-limit-s", type=_positive(float), default=None)
    p.add_argument("--strip-unreferenced", action="store_true")
    p.add_argument("--fan", action="store_true")
    return parser


def _load(path, args):
    soup = io.load_mesh(path, io.Triangulate.FAN if args.fan else io.Triangulate.REJECT)
    if args.strip_unreferenced:
        soup = validate(soup, Policy.STRIP_UNREFERENCED)
    return soup


def _config(args) -> SolverConfig:
    return SolverConfig(epsilon=args.eps, max_factor=args.max_factor, cascade=args.order,
                        time_limit=args.time_limit_s)


def format_report(r: HausdorffReport, title: str = "h(A,B)") -> str:
    s = r.stats
    hist = " ".join(f"{k}={v}" for k, v in s.bound_histogram.items() if v)
    return "\n".join([
        f"{title}: [{r.lower:.17g}, {r.upper:.17g}]",
        f"  status        {r.status}",
        f"  gap           {r.upper - r.lower:.3e} ({100.0 * r.relative_gap:.3g}% of dA = {r.dA:.6g})",
        f"  faces         {s.faces_processed} processed, {s.subdivisions} subdivisions, "
        f"peak queue {s.peak_queue}",
        f"  bounds        {hist or '-'}",
        f"  time          {s.wall_time_s:.3f} s",
    ])


def _emit(report, args, out):
    if args.json or args.pretty:
        out.write(io.write_report(report, pretty=args.pretty).decode())
    else:
        out.write(format_report(report) + "\n")


def run_distance(args, out) -> int:
    a, b = _load(args.mesh_a, args), _load(args.mesh_b, args)
    report = solve(a, b, _config(args))
    _emit(report, args, out)
    return exit_code(report.status)


def run_symmetric(args, out) -> int:
    a, b = _load(args.mesh_a, args), _load(args.mesh_b, args)
    res = solve_symmetric(a, b, _config(args))
    if args.json or args.pretty:
        doc = {"lower": res.lower, "upper": res.upper,
               "ab": io.report_to_dict(res.ab), "ba": io.report_to_dict(res.ba)}
        out.write(io.dumps(doc, pretty=args.pretty) + "\n")
    else:
        out.write(f"H(A,B): [{res.lower:.17g}, {res.upper:.17g}]\n")
        out.write(format_report(res.ab, "h(A,B)") + "\n")
        out.write(format_report(res.ba, "h(B,A)") + "\n")
    # the worse of the two directions decides
    return max(exit_code(res.ab.status), exit_code(res.ba.status))


def run_sample(args, out) -> int:
    a, b = _load(args.mesh_a, args), _load(args.mesh_b, args)
    if args.per_face is not None:
        spec = oracle.SampleSpec(samples_per_face=args.per_face, seed=args.seed)
    else:
        spec = oracle.SampleSpec(total_samples=args.samples or 100_000, seed=args.seed)
    out.write("%.17g\n" % oracle.sampled_lower_bound(a, b, spec))
    return 0


def run_ablation(args, out) -> int:
    rows = []
    for i, (pa, pb) in enumerate(ablation.read_manifest(args.manifest)):
        pair_id = f"{i}:{pa.name}|{pb.name}"
        try:
            pair = (pair_id, _load(pa, args), _load(pb, args))
        except (MeshError, OSError) as exc:
            rows += ablation.error_rows(pair_id, exc)
            continue
        rows += ablation.sweep([pair], epsilon=args.eps, max_factor=args.max_factor,
                               time_limit=args.time_limit_s)
    ablation.write_csv(rows, out)
    return 0


_COMMANDS = {
    "distance": run_distance,
    "symmetric": run_symmetric,
    "sample": run_sample,
    "ablate": run_ablation,
}


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad usage; 2 is reserved for QueueExhausted here
        return EXIT_INPUT_ERROR if exc.code else 0
    try:
        return _COMMANDS[args.command](args, out)
    except (MeshError, OSError, ValueError) as exc:
        err.write(f"trihausdorff: error: {exc}\n")
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
