import numpy as np
import pytest

from geotri.geometry import BoundaryFixing, random_convex_polygon
from geotri.mesh import random_disk_triangulation
from geotri.tutte import random_weights, tutte_solve


def random_instance(rng, max_boundary=12, max_interior=200, min_interior=0):
    """Random triangulation, strictly convex boundary and permissible weights."""
    m = int(rng.integers(3, max_boundary + 1))
    ni = int(rng.integers(min_interior, max_interior + 1))
    tri = random_disk_triangulation(m, ni, rng=rng)
    fix = BoundaryFixing(tri.boundary, random_convex_polygon(m, rng))
    return tri, fix, random_weights(tri, rng)


def random_embedding(rng, **kw):
    tri, fix, w = random_instance(rng, **kw)
    return tutte_solve(tri, fix, w)


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


# -- acceptance reporting ----------------------------------------------------
# tests marked ``criterion(n, title)`` get one PASS/FAIL line in the summary

_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    num, title = mark.args
    entry = _criteria.setdefault(num, {"title": title, "ok": True, "detail": []})
    if rep.failed:
        entry["ok"] = False
    if rep.when == "call":
        entry["detail"] += [v for k, v in item.user_properties if k == "detail"]


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for num in sorted(_criteria):
        e = _criteria[num]
        line = f"criterion {num:2d}: {'PASS' if e['ok'] else 'FAIL'}  {e['title']}"
        if e["detail"]:
            line += "  [" + "; ".join(e["detail"]) + "]"
        tr.write_line(line)


@pytest.fixture
def detail(record_property):
    """Attach a short measured value to the criterion line."""
    def add(text):
        record_property("detail", text)
    return add
