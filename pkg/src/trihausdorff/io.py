"""Mesh readers (OBJ, ASCII and binary STL) and the JSON report format."""
from __future__ import annotations

import enum
import json
import math
import os
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .mesh import EmptyFaceList, IndexOutOfRange, MeshError, TriangleSoup
from .solver import HausdorffReport, SolverStats, Status


class ParseError(MeshError):
    """Malformed input; ``line`` (text formats) or ``offset`` (binary) locate it."""

    def __init__(self, message: str, line: int | None = None, offset: int | None = None,
                 path: str | None = None):
        self.line = line
        self.offset = offset
        self.path = path
        where = []
        if path:
            where.append(str(path))
        if line is not None:
            where.append(f"line {line}")
        if offset is not None:
            where.append(f"byte {offset}")
        super().__init__(f"{': '.join(where)}: {message}" if where else message)


class NonTriangleFace(MeshError):
    pass


class Triangulate(enum.Enum):
    REJECT = "reject"
    FAN = "fan"


class MeshFormat(enum.Enum):
    OBJ = "obj"
    STL_ASCII = "stl-ascii"
    STL_BINARY = "stl-binary"


@dataclass(frozen=True)
class MeshFile:
    path: Path
    format: MeshFormat

    @classmethod
    def open(cls, path) -> MeshFile:
        path = Path(path)
        return cls(path, detect_format(path))


def detect_format(path) -> MeshFormat:
    """OBJ by extension; STL is ASCII only if it starts with ``solid`` and is
    not a binary file whose size matches its facet count."""
    path = Path(path)
    if path.suffix.lower() == ".obj":
        return MeshFormat.OBJ
    with open(path, "rb") as fh:
        head = fh.read(84)
    if not head.lstrip()[:5].lower() == b"solid":
        return MeshFormat.STL_BINARY
    if len(head) == 84:
        (count,) = struct.unpack("<I", head[80:84])
        if os.path.getsize(path) == 84 + 50 * count:
            return MeshFormat.STL_BINARY
    return MeshFormat.STL_ASCII


def load_mesh(file, triangulate: Triangulate | str = Triangulate.REJECT) -> TriangleSoup:
    """Read an OBJ or STL file into a :class:`TriangleSoup`.

    STL facets get three fresh vertices each (no welding). OBJ polygons with
    more than three corners raise :class:`NonTriangleFace` unless
    ``triangulate="fan"``.
    """
    if not isinstance(file, MeshFile):
        file = MeshFile.open(file)
    triangulate = Triangulate(triangulate)
    if file.format is MeshFormat.OBJ:
        with open(file.path, "r", encoding="utf-8", errors="replace") as fh:
            return parse_obj(fh.read(), triangulate, path=str(file.path))
    data = file.path.read_bytes()
    if file.format is MeshFormat.STL_BINARY:
        return parse_stl_binary(data, path=str(file.path))
    return parse_stl_ascii(data.decode("ascii", errors="replace"), path=str(file.path))


def _obj_index(tok: str, n_vertices: int, lineno: int, path) -> int:
    head = tok.split("/", 1)[0]
    try:
        i = int(head)
    except ValueError:
        raise ParseError(f"bad face index {tok!r}", line=lineno, path=path) from None
    if i > 0:
        i -= 1
    elif i < 0:
        i += n_vertices
    else:
        raise ParseError("face index 0 is invalid in OBJ", line=lineno, path=path)
    if not 0 <= i < n_vertices:
        raise IndexOutOfRange(f"{path or '<obj>'}: line {lineno}: index {tok!r} "
                              f"outside the {n_vertices} vertices defined so far")
    return i


def parse_obj(text: str, triangulate: Triangulate | str = Triangulate.REJECT,
              path: str | None = None) -> TriangleSoup:
    triangulate = Triangulate(triangulate)
    verts = []
    faces = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        tag = parts[0]
        if tag == "v":
            if len(parts) < 4:
                raise ParseError("vertex needs three coordinates", line=lineno, path=path)
            try:
                verts.append([float(x) for x in parts[1:4]])
            except ValueError:
                raise ParseError(f"bad vertex coordinate in {line!r}", line=lineno,
                                 path=path) from None
        elif tag == "f":
            idx = [_obj_index(t, len(verts), lineno, path) for t in parts[1:]]
            if len(idx) < 3:
                raise ParseError("face needs at least three vertices", line=lineno, path=path)
            if len(idx) > 3 and triangulate is Triangulate.REJECT:
                raise NonTriangleFace(f"{path or '<obj>'}: line {lineno}: face has "
                                      f"{len(idx)} vertices")
            for k in range(1, len(idx) - 1):
                faces.append([idx[0], idx[k], idx[k + 1]])
    if not faces:
        raise EmptyFaceList(f"{path or '<obj>'}: no faces")
    return TriangleSoup(np.array(verts, dtype=float).reshape(-1, 3), np.array(faces))


def parse_stl_binary(data: bytes, path: str | None = None) -> TriangleSoup:
    if len(data) < 84:
        raise ParseError("binary STL shorter than its 84-byte header", offset=len(data), path=path)
    (count,) = struct.unpack_from("<I", data, 80)
    need = 84 + 50 * count
    if len(data) < need:
        raise ParseError(f"header declares {count} facets but the file ends early",
                         offset=len(data), path=path)
    if count == 0:
        raise EmptyFaceList(f"{path or '<stl>'}: no facets")
    rec = np.dtype([("normal", "<f4", 3), ("v", "<f4", (3, 3)), ("attr", "<u2")])
    facets = np.frombuffer(data, dtype=rec, count=count, offset=84)
    verts = facets["v"].reshape(-1, 3).astype(np.float64)
    return TriangleSoup(verts, np.arange(3 * count).reshape(-1, 3))


def parse_stl_ascii(text: str, path: str | None = None) -> TriangleSoup:
    verts = []
    lines = text.splitlines()
    state = "solid"
    pending = []
    for lineno, raw in enumerate(lines, start=1):
        parts = raw.split()
        if not parts:
            continue
        key = parts[0].lower()
        if state == "solid":
            if key != "solid":
                raise ParseError("expected 'solid'", line=lineno, path=path)
            state = "body"
        elif state == "body":
            if key == "facet":
                state = "facet"
            elif key == "endsolid":
                state = "done"
            else:
                raise ParseError(f"expected 'facet' or 'endsolid', got {parts[0]!r}",
                                 line=lineno, path=path)
        elif state == "facet":
            if key != "outer":
                raise ParseError("expected 'outer loop'", line=lineno, path=path)
            state = "loop"
        elif state == "loop":
            if key == "vertex":
                if len(parts) != 4:
                    raise ParseError("vertex needs three coordinates", line=lineno, path=path)
                try:
                    pending.append([float(x) for x in parts[1:]])
                except ValueError:
                    raise ParseError("bad vertex coordinate", line=lineno, path=path) from None
            elif key == "endloop":
                if len(pending) != 3:
                    raise ParseError(f"facet has {len(pending)} vertices, expected 3",
                                     line=lineno, path=path)
                verts.extend(pending)
                pending = []
                state = "endfacet"
            else:
                raise ParseError(f"unexpected {parts[0]!r} inside loop", line=lineno, path=path)
        elif state == "endfacet":
            if key != "endfacet":
                raise ParseError("expected 'endfacet'", line=lineno, path=path)
            state = "body"
        elif state == "done":
            raise ParseError("content after 'endsolid'", line=lineno, path=path)
    if state != "done":
        raise ParseError("unexpected end of file", line=len(lines), path=path)
    if not verts:
        raise EmptyFaceList(f"{path or '<stl>'}: no facets")
    n = len(verts) // 3
    return TriangleSoup(np.array(verts), np.arange(3 * n).reshape(-1, 3))


# ---------------------------------------------------------------------------
# JSON report
# ---------------------------------------------------------------------------

def _fmt(x, indent, level):
    if isinstance(x, bool) or x is None:
        return json.dumps(x)
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if not math.isfinite(x):
            raise ValueError(f"cannot serialise non-finite number {x}")
        s = "%.17g" % x
        if "." not in s and "e" not in s and "n" not in s:
            s += ".0"
        return s
    if isinstance(x, str):
        return json.dumps(x)
    if isinstance(x, dict):
        if not x:
            return "{}"
        items = [json.dumps(str(k)) + ": " + _fmt(v, indent, level + 1) for k, v in x.items()]
        if indent is None:
            return "{" + ", ".join(items) + "}"
        pad = "\n" + " " * (indent * (level + 1))
        return "{" + pad + ("," + pad).join(items) + "\n" + " " * (indent * level) + "}"
    if isinstance(x, (list, tuple)):
        inner = [_fmt(v, indent, level + 1) for v in x]
        return "[" + ", ".join(inner) + "]"
    raise TypeError(f"cannot serialise {type(x).__name__}")


def report_to_dict(report: HausdorffReport) -> dict:
    s = report.stats
    return {
        "lower": report.lower,
        "upper": report.upper,
        "dA": report.dA,
        "relative_gap": report.relative_gap,
        "status": str(report.status),
        "stats": {
            "faces_processed": s.faces_processed,
            "subdivisions": s.subdivisions,
            "peak_queue": s.peak_queue,
            "bound_histogram": dict(s.bound_histogram),
            "wall_time_s": s.wall_time_s,
            "iterations": s.iterations,
            "stale_dropped": s.stale_dropped,
            "monotonicity_violations": s.monotonicity_violations,
        },
    }


def dumps(obj, pretty: bool = False) -> str:
    """JSON text with every float written to 17 significant digits."""
    return _fmt(obj, 2 if pretty else None, 0)


def write_report(report: HausdorffReport, pretty: bool = False) -> bytes:
    return (dumps(report_to_dict(report), pretty) + "\n").encode("utf-8")


def read_report(data: bytes | str) -> HausdorffReport:
    d = json.loads(data)
    s = d["stats"]
    stats = SolverStats(
        faces_processed=int(s["faces_processed"]),
        subdivisions=int(s["subdivisions"]),
        peak_queue=int(s["peak_queue"]),
        bound_histogram={k: int(v) for k, v in s["bound_histogram"].items()},
        wall_time_s=float(s["wall_time_s"]),
        iterations=int(s.get("iterations", 0)),
        stale_dropped=int(s.get("stale_dropped", 0)),
        monotonicity_violations=int(s.get("monotonicity_violations", 0)),
    )
    return HausdorffReport(float(d["lower"]), float(d["upper"]), float(d["dA"]),
                           float(d["relative_gap"]), Status(d["status"]), stats)
