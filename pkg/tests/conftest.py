import functools

import numpy as np
import pytest

import trihausdorff
from trihausdorff import ablation, cli, solver, synthetic
from trihausdorff.mesh import TriangleSoup

# acceptance criterion number -> (passed, detail); filled by test_acceptance
ACCEPTANCE = {}

# every solve() made during the session: (iterations, monotonicity violations)
SOLVE_LOG = []


def _install_solve_log():
    inner = solver.solve

    @functools.wraps(inner)
    def logged(*args, **kwargs):
        r = inner(*args, **kwargs)
        SOLVE_LOG.append((r.stats.iterations, r.stats.monotonicity_violations))
        return r

    for mod in (solver, trihausdorff, cli, ablation):
        mod.solve = logged


_install_solve_log()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def unit_tri():
    return np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])


@pytest.fixture
def cube():
    return synthetic.unit_cube()


@pytest.fixture
def single_face(unit_tri):
    return TriangleSoup(unit_tri, [[0, 1, 2]])


@pytest.fixture
def write_obj():
    def write(path, soup):
        lines = [f"v {x!r} {y!r} {z!r}" for x, y, z in soup.vertices.tolist()]
        lines += [f"f {a + 1} {b + 1} {c + 1}" for a, b, c in soup.faces.tolist()]
        path.write_text("\n".join(lines) + "\n")
        return str(path)
    return write


@pytest.fixture
def acceptance():
    def record(number, passed, detail=""):
        ACCEPTANCE[number] = (bool(passed), detail)
    return record


def monotonicity_summary():
    runs = len(SOLVE_LOG)
    iters = sum(i for i, _ in SOLVE_LOG)
    bad = sum(v for _, v in SOLVE_LOG)
    return runs, iters, bad


def pytest_sessionfinish(session, exitstatus):
    if monotonicity_summary()[2] and session.exitstatus == 0:
        session.exitstatus = 1


def pytest_terminal_summary(terminalreporter):
    runs, iters, bad = monotonicity_summary()
    if runs:
        terminalreporter.section("monotonicity")
        terminalreporter.write_line(
            f"{runs} solver runs, {iters} iterations, {bad} violations of l up / u down")
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
