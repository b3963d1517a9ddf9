import json
import math
import struct

import numpy as np
import pytest

from trihausdorff import io, synthetic
from trihausdorff.io import MeshFormat, NonTriangleFace, ParseError
from trihausdorff.mesh import EmptyFaceList, IndexOutOfRange, TriangleSoup
from trihausdorff.solver import HausdorffReport, SolverStats, Status, solve


def write_binary_stl(path, tris, header=b"binary"):
    tris = np.asarray(tris, dtype="<f4").reshape(-1, 3, 3)
    rec = np.zeros(len(tris), dtype=[("normal", "<f4", 3), ("v", "<f4", (3, 3)), ("attr", "<u2")])
    rec["v"] = tris
    path.write_bytes(header.ljust(80, b"\0") + struct.pack("<I", len(tris)) + rec.tobytes())


def ascii_stl(tris):
    out = ["solid test"]
    for t in tris:
        out += ["  facet normal 0 0 1", "    outer loop"]
        out += [f"      vertex {float(x)!r} {float(y)!r} {float(z)!r}" for x, y, z in t]
        out += ["    endloop", "  endfacet"]
    out.append("endsolid test")
    return "\n".join(out) + "\n"


class TestObj:
    def test_basic(self, tmp_path):
        p = tmp_path / "t.obj"
        p.write_text("# tri\nv 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n")
        s = io.load_mesh(p)
        assert (s.n_vertices, s.n_faces) == (3, 1)
        assert s.faces.tolist() == [[0, 1, 2]]

    def test_quad(self, tmp_path):
        p = tmp_path / "q.obj"
        p.write_text("v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n")
        with pytest.raises(NonTriangleFace):
            io.load_mesh(p)
        assert io.load_mesh(p, "fan").faces.tolist() == [[0, 1, 2], [0, 2, 3]]

    def test_negative_and_slashes(self):
        s = io.parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nvt 0 0\nvn 0 0 1\nf -3/1/1 -2//1 -1/1\n")
        assert s.faces.tolist() == [[0, 1, 2]]

    def test_errors_carry_line(self):
        with pytest.raises(ParseError) as e:
            io.parse_obj("v 0 0 0\nv 1 0\n")
        assert e.value.line == 2
        with pytest.raises(ParseError):
            io.parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 0 1 2\n")
        with pytest.raises(ParseError):
            io.parse_obj("v 0 0 0\nv 1 0 x\n")
        with pytest.raises(IndexOutOfRange):
            io.parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 4\n")
        with pytest.raises(EmptyFaceList):
            io.parse_obj("v 0 0 0\n")

    def test_order_preserved(self):
        s = io.parse_obj("v 3 0 0\nv 2 0 0\nv 1 1 0\nf 3 1 2\nf 1 2 3\n")
        assert s.vertices[:, 0].tolist() == [3, 2, 1]
        assert s.faces.tolist() == [[2, 0, 1], [0, 1, 2]]


class TestStl:
    def test_binary_round_trip(self, tmp_path, rng):
        tris = rng.normal(size=(2, 3, 3)).astype(np.float32)
        p = tmp_path / "b.stl"
        write_binary_stl(p, tris)
        s = io.load_mesh(p)
        assert (s.n_vertices, s.n_faces) == (6, 2)
        np.testing.assert_array_equal(s.triangles, tris.astype(np.float64))
        write_binary_stl(tmp_path / "c.stl", s.triangles)
        assert (tmp_path / "c.stl").read_bytes() == p.read_bytes()

    def test_binary_header_starting_with_solid(self, tmp_path):
        p = tmp_path / "b.stl"
        write_binary_stl(p, np.eye(3)[None], header=b"solid but binary")
        assert io.detect_format(p) is MeshFormat.STL_BINARY
        assert io.load_mesh(p).n_faces == 1

    def test_binary_truncated(self):
        data = b"\0" * 80 + struct.pack("<I", 3) + b"\0" * 60
        with pytest.raises(ParseError) as e:
            io.parse_stl_binary(data)
        assert e.value.offset == len(data)
        with pytest.raises(ParseError):
            io.parse_stl_binary(b"short")

    def test_binary_count_honoured(self):
        rec = b"\0" * 50
        data = b"\0" * 80 + struct.pack("<I", 1) + rec * 3
        assert io.parse_stl_binary(data).n_faces == 1

    def test_ascii(self, tmp_path, rng):
        tris = rng.normal(size=(3, 3, 3))
        p = tmp_path / "a.stl"
        p.write_text(ascii_stl(tris))
        assert io.detect_format(p) is MeshFormat.STL_ASCII
        s = io.load_mesh(p)
        assert s.n_faces == 3 and s.n_vertices == 9
        np.testing.assert_array_equal(s.triangles, tris)

    def test_ascii_errors(self):
        good = ascii_stl(np.eye(3)[None])
        with pytest.raises(ParseError) as e:
            io.parse_stl_ascii(good.replace("endloop", "loopend"))
        assert e.value.line == 7
        with pytest.raises(ParseError):
            io.parse_stl_ascii(good.replace("endsolid test\n", ""))
        with pytest.raises(EmptyFaceList):
            io.parse_stl_ascii("solid x\nendsolid x\n")


def cube_report():
    return solve(synthetic.unit_cube(), synthetic.unit_cube())


def face_report():
    t = TriangleSoup([[0, 0, 0], [1, 0, 0], [0, 1, 0]], [[0, 1, 2]])
    return solve(t, t)


class TestReport:
    def test_schema(self):
        d = json.loads(io.write_report(cube_report()))
        assert set(d) == {"lower", "upper", "dA", "relative_gap", "status", "stats"}
        assert d["status"] == "Converged" and d["lower"] == 0
        assert {"faces_processed", "subdivisions", "peak_queue", "bound_histogram",
                "wall_time_s"} <= set(d["stats"])
        assert set(d["stats"]["bound_histogram"]) == {"exact", "u1", "u2", "u3", "u4", "zheng"}

    def test_gap_digits(self):
        lo, hi, da = 2.0, 2.0 + 1e-9, math.sqrt(3)
        r = HausdorffReport(lo, hi, da, (hi - lo) / da, Status.CONVERGED, SolverStats())
        text = io.write_report(r).decode()
        assert "%.17g" % ((r.upper - r.lower) / r.dA) in text
        assert io.read_report(text).relative_gap == (r.upper - r.lower) / r.dA

    def test_round_trip(self, rng):
        for _ in range(100):
            lo = float(rng.random() * 10.0 ** rng.integers(-12, 6))
            hi = lo + float(rng.random())
            s = SolverStats(*[int(x) for x in rng.integers(0, 10 ** 6, 3)],
                            bound_histogram={k: int(rng.integers(100)) for k in
                                             ("exact", "u1", "u2", "u3", "u4", "zheng")},
                            wall_time_s=float(rng.random()))
            r = HausdorffReport(lo, hi, float(rng.random()) + 0.1, float(rng.random()),
                                Status(rng.choice([x.value for x in Status])), s)
            for pretty in (False, True):
                back = io.read_report(io.write_report(r, pretty))
                assert back == r

    def test_pretty_is_indented(self):
        text = io.write_report(cube_report(), pretty=True).decode()
        assert text.endswith("}\n") and "\n  \"lower\"" in text

    def test_golden_modulo_time(self):
        d = json.loads(io.write_report(face_report()))
        d["stats"]["wall_time_s"] = 0
        assert d == {
            "lower": 0.0, "upper": 0.0, "dA": math.sqrt(2), "relative_gap": 0.0,
            "status": "Converged",
            "stats": {"faces_processed": 1, "subdivisions": 0, "peak_queue": 1,
                      "bound_histogram": {"exact": 1, "u1": 0, "u2": 0, "u3": 0, "u4": 0,
                                          "zheng": 0},
                      "wall_time_s": 0, "iterations": 0, "stale_dropped": 0,
                      "monotonicity_violations": 0},
        }

    def test_rejects_nan(self):
        r = HausdorffReport(float("nan"), 1.0, 1.0, 0.0, Status.CONVERGED, SolverStats())
        with pytest.raises(ValueError):
            io.write_report(r)
