import csv
import io as _io
from pathlib import Path

import pytest

from trihausdorff import ablation, cli, synthetic
from trihausdorff.ablation import SweepRow


def test_64_orderings():
    orders = ablation.all_orderings()
    lens = [len(o.order) for o in orders]
    assert len(orders) == 64
    assert [lens.count(k) for k in (1, 2, 3, 4)] == [4, 12, 24, 24]
    assert len({o.to_string() for o in orders}) == 64


def test_shared_wins():
    rows = [
        SweepRow("p", "1", "Converged", 1.00, 0, 0, 0),
        SweepRow("p", "2", "Converged", 1.04, 0, 0, 0),
        SweepRow("p", "3", "Converged", 1.10, 0, 0, 0),
        SweepRow("p", "4", "BudgetExceeded", 0.5, 0, 0, 0),
        SweepRow("q", "1", "Converged", 3.0, 0, 0, 0),
        SweepRow("q", "2", "Converged", 2.0, 0, 0, 0),
        SweepRow("q", "3", "BudgetExceeded", 1.0, 0, 0, 0),
        SweepRow("q", "4", "BudgetExceeded", 1.0, 0, 0, 0),
        # nothing converged: ignored
        SweepRow("r", "1", "TimeLimit", 1.0, 0, 0, 0),
        SweepRow("r", "2", "TimeLimit", 1.0, 0, 0, 0),
        SweepRow("r", "3", "TimeLimit", 1.0, 0, 0, 0),
        SweepRow("r", "4", "TimeLimit", 1.0, 0, 0, 0),
    ]
    assert ablation.shared_wins(rows) == {"1": 50.0, "2": 100.0, "3": 0.0, "4": 0.0}
    assert ablation.convergence_counts(rows) == {"1": 2, "2": 2, "3": 1, "4": 0}


def test_manifest(tmp_path):
    m = tmp_path / "pairs.txt"
    m.write_text("# header\na.obj, b.obj\n\n/abs/c.stl,d.stl  # trailing\n")
    pairs = ablation.read_manifest(m)
    assert pairs == [(tmp_path / "a.obj", tmp_path / "b.obj"),
                     (Path("/abs/c.stl"), tmp_path / "d.stl")]
    m.write_text("only_one.obj\n")
    with pytest.raises(ValueError):
        ablation.read_manifest(m)


def test_sweep_identical_pair():
    cube = synthetic.unit_cube()
    rows = ablation.sweep([("id", cube, cube)])
    assert len(rows) == 64 and all(r.converged for r in rows)
    out = _io.StringIO()
    ablation.write_csv(rows, out)
    head, tail = out.getvalue().split("\n\n")
    body = list(csv.reader(_io.StringIO(head)))
    assert tuple(body[0]) == ablation.COLUMNS and len(body) == 65
    summary = list(csv.reader(_io.StringIO(tail)))
    assert summary[0] == ["order", "shared_win_pct", "converged_pairs"]
    assert len(summary) == 65 and all(s[2] == "1" for s in summary[1:])


def test_errors_become_rows():
    rows = ablation.error_rows("bad", ValueError("boom"))
    assert len(rows) == 64 and all(r.status == "Error: boom" for r in rows)


def test_cli_ablate(tmp_path, write_obj):
    a, b = synthetic.decimation_pair(0)
    write_obj(tmp_path / "a.obj", a)
    write_obj(tmp_path / "b.obj", b)
    (tmp_path / "bad.obj").write_text("v 0 0 0\n")
    m = tmp_path / "m.txt"
    m.write_text("a.obj,b.obj\nbad.obj,b.obj\nmissing.obj,b.obj\n")
    out, err = _io.StringIO(), _io.StringIO()
    assert cli.main(["ablate", str(m), "--max-factor", "1000"], out, err) == 0
    head, tail = out.getvalue().split("\n\n")
    body = list(csv.DictReader(_io.StringIO(head)))
    assert len(body) == 3 * 64
    assert all(r["status"] == "Converged" for r in body[:64])
    assert all(r["status"].startswith("Error") for r in body[64:])
    assert len(list(csv.reader(_io.StringIO(tail)))) == 65
