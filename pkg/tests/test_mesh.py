import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from geotri.mesh import (DiskTriangulation, EdgeKind, count_weight_dofs, dimension_of_x,
                         fan_triangulation, random_disk_triangulation,
                         validate_combinatorics)


def _edge_counts(tri):
    # computed from the raw face list, independent of the class helpers
    edges = {tuple(sorted(e)) for f in tri.faces.tolist()
             for e in ((f[0], f[1]), (f[1], f[2]), (f[2], f[0]))}
    b = set(tri.boundary)
    ring = {tuple(sorted((tri.boundary[i], tri.boundary[(i + 1) % len(b)])))
            for i in range(len(b))}
    return len(edges), len(edges - ring), len(ring)


@settings(max_examples=60, deadline=None)
@given(st.integers(3, 15), st.integers(0, 120), st.integers(0, 2 ** 31))
def test_counting_identities(m, ni, seed):
    tri = random_disk_triangulation(m, ni, rng=seed)
    assert validate_combinatorics(tri).ok
    e, ei, eb = _edge_counts(tri)
    vi, vb, f = tri.n_interior, tri.n_boundary, tri.n_faces
    assert tri.vertex_count - e + f == 1
    assert f == 2 * vi + vb - 2
    assert ei - 3 * vi == eb - 3
    assert len(tri.interior_edges) == ei


def test_dofs_examples():
    tri = DiskTriangulation(4, (0, 1, 2), [[0, 1, 3], [1, 2, 3], [2, 0, 3]])
    assert count_weight_dofs(tri) == (2, 5)
    sq = DiskTriangulation(5, (0, 1, 2, 3), [[0, 1, 4], [1, 2, 4], [2, 3, 4], [3, 0, 4]])
    assert count_weight_dofs(sq).direct == 3
    assert count_weight_dofs(fan_triangulation(7)).direct == 0
    assert dimension_of_x(tri) == 2
    assert dimension_of_x(fan_triangulation(5)) == 0


def test_dividing_edges():
    tri = fan_triangulation(6)
    assert len(tri.dividing_edges) == 3
    for i, j in tri.dividing_edges:
        assert tri.edge_kind(i, j) == EdgeKind.DIVIDING
    # a dividing edge adds two to the edge formula and nothing to the direct one
    d = count_weight_dofs(tri)
    assert d.edge_formula - d.direct == 2 * len(tri.dividing_edges)


@pytest.mark.parametrize("faces,needle", [
    ([[0, 1, 3], [1, 0, 4], [0, 1, 2]], "non-manifold"),
    ([[0, 2, 1]], "counterclockwise"),
    ([[0, 1, 2], [0, 1, 2]], "duplicate"),
    ([[0, 1, 1]], "degenerate"),
])
def test_validate_reports(faces, needle):
    n = 1 + max(max(f) for f in faces)
    tri = DiskTriangulation(max(n, 3), (0, 1, 2), faces)
    rep = validate_combinatorics(tri)
    assert not rep.ok
    assert any(needle in v for v in rep.violations), rep.violations


def test_validate_idempotent():
    tri = DiskTriangulation(5, (0, 1, 2), [[0, 1, 3], [1, 0, 4], [0, 1, 2]])
    a = validate_combinatorics(tri).violations
    assert validate_combinatorics(tri).violations == a


def test_roundtrip_dict(rng):
    tri = random_disk_triangulation(7, 40, rng=rng)
    back = DiskTriangulation.from_dict(tri.to_dict())
    assert back.boundary == tri.boundary
    assert np.array_equal(back.faces, tri.faces)


def test_generator_deterministic():
    a = random_disk_triangulation(9, 50, rng=3)
    b = random_disk_triangulation(9, 50, rng=3)
    assert np.array_equal(a.faces, b.faces)
