import io as _io
import json
import math
import os
import subprocess
import sys

import pytest

from trihausdorff import cli, synthetic
from trihausdorff.solver import Status


@pytest.fixture
def meshes(tmp_path, write_obj):
    cube = synthetic.unit_cube()
    a, b = synthetic.decimation_pair(0)
    return {
        "cube": write_obj(tmp_path / "cube.obj", cube),
        "shift": write_obj(tmp_path / "cube_shift2.obj", cube.translated((2, 0, 0))),
        "far": write_obj(tmp_path / "far.obj", synthetic.with_far_vertex(cube)),
        "a": write_obj(tmp_path / "a.obj", a),
        "b": write_obj(tmp_path / "b.obj", b),
    }


def run(*argv):
    out, err = _io.StringIO(), _io.StringIO()
    code = cli.main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def test_identical(meshes):
    code, out, _ = run("distance", meshes["cube"], meshes["cube"], "--json")
    d = json.loads(out)
    assert code == 0 and d["lower"] == 0 and d["status"] == "Converged"


def test_translated(meshes):
    code, out, _ = run("distance", meshes["cube"], meshes["shift"], "--json")
    d = json.loads(out)
    assert code == 0
    assert d["lower"] <= 2 <= d["upper"]
    assert d["upper"] - d["lower"] <= 1e-8 * math.sqrt(3)


def test_order_histogram(meshes):
    code, out, _ = run("distance", meshes["a"], meshes["b"], "--order", "21", "--json")
    hist = json.loads(out)["stats"]["bound_histogram"]
    assert code == 0
    assert {k for k, v in hist.items() if v} <= {"exact", "u1", "u2"}


def test_human_readable(meshes):
    code, out, _ = run("distance", meshes["cube"], meshes["shift"])
    assert code == 0
    assert "Converged" in out and "% of dA" in out


def test_pretty(meshes):
    _, out, _ = run("distance", meshes["cube"], meshes["cube"], "--pretty")
    assert out.startswith("{\n  ") and json.loads(out)["lower"] == 0


@pytest.mark.parametrize("order", ["", "11", "125", "x"])
def test_bad_order(meshes, order):
    code, out, _ = run("distance", meshes["cube"], meshes["cube"], "--order", order)
    assert code == 1 and out == ""


def test_exit_codes_total():
    assert {cli.exit_code(s) for s in Status} == {0, 2, 3, 4}
    assert cli.exit_code("BudgetExceeded") == 3


def test_queue_exhausted_and_strip(meshes):
    code, out, _ = run("distance", meshes["far"], meshes["cube"], "--json")
    assert code == 2 and json.loads(out)["status"] == "QueueExhausted"
    code, _, _ = run("distance", meshes["far"], meshes["cube"], "--strip-unreferenced")
    assert code == 0


def test_budget(meshes):
    code, out, _ = run("distance", meshes["a"], meshes["b"], "--max-factor", "1", "--json")
    d = json.loads(out)
    assert code == 3 and d["lower"] <= d["upper"]


def test_missing_file(tmp_path):
    code, _, err = run("distance", str(tmp_path / "nope.obj"), str(tmp_path / "nope.obj"))
    assert code == 1 and "error" in err


def test_parse_error_position(tmp_path, meshes):
    bad = tmp_path / "bad.obj"
    bad.write_text("v 0 0 0\nv 1 0 0\nv 0 1 zz\nf 1 2 3\n")
    code, _, err = run("distance", str(bad), meshes["cube"])
    assert code == 1 and "line 3" in err


def test_quad_fan(tmp_path, meshes):
    q = tmp_path / "quad.obj"
    q.write_text("v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n")
    assert run("distance", str(q), meshes["cube"])[0] == 1
    assert run("distance", str(q), meshes["cube"], "--fan")[0] == 0


def test_symmetric(meshes):
    code, out, _ = run("symmetric", meshes["cube"], meshes["shift"], "--json")
    d = json.loads(out)
    assert code == 0 and d["lower"] <= 2 <= d["upper"]
    assert d["ab"]["status"] == d["ba"]["status"] == "Converged"
    code, out, _ = run("symmetric", meshes["cube"], meshes["shift"])
    assert "H(A,B)" in out and "h(B,A)" in out


def test_symmetric_worst_direction(meshes):
    # A has the far vertex: h(A,B) exhausts the queue, h(B,A) converges
    code, _, _ = run("symmetric", meshes["far"], meshes["cube"])
    assert code == 2


def test_sample(meshes):
    code, out, _ = run("sample", meshes["cube"], meshes["shift"], "--samples", "10000")
    assert code == 0 and 2 - 1e-9 <= float(out) <= 2
    code, out, _ = run("sample", meshes["cube"], meshes["cube"], "--per-face", "5", "--seed", "2")
    assert code == 0 and float(out) < 1e-12
    assert run("sample", meshes["cube"], meshes["cube"], "--per-face", "5", "--samples", "9")[0] == 1


def test_help_exits_zero(capsys):
    assert cli.main(["--help"]) == 0
    assert "distance" in capsys.readouterr().out


def test_module_entry_point(meshes):
    env = dict(os.environ)
    p = subprocess.run([sys.executable, "-m", "trihausdorff", "distance", meshes["far"],
                        meshes["cube"]], capture_output=True, text=True, env=env)
    assert p.returncode == 2 and "QueueExhausted" in p.stdout
