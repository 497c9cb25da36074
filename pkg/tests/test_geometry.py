from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from geotri.geometry import (BoundaryFixing, GeodesicEmbedding, MismatchedBoundary,
                             in_convex_hull_of_neighbors, interior_angle, is_strictly_convex,
                             orient2d, polygon_area, polygon_is_simple, random_convex_polygon,
                             verify_embedding)
from geotri.mesh import DiskTriangulation

from conftest import random_embedding


def _exact_sign(a, b, c):
    a, b, c = ([Fraction(float(x)) for x in p] for p in (a, b, c))
    d = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    return (d > 0) - (d < 0)


coord = st.floats(-1e3, 1e3, allow_nan=False)


@settings(max_examples=300, deadline=None)
@given(st.tuples(coord, coord), st.tuples(coord, coord), st.floats(-1, 2), st.floats(-1e-14, 1e-14))
def test_orient2d_matches_exact(a, b, s, jitter):
    # third point on or next to the line through a, b
    c = (a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1]) + jitter)
    assert orient2d(a, b, c) == _exact_sign(a, b, c)


def test_convexity_and_area():
    sq = np.array([[0, 0], [1, 0], [1, 1], [0, 1]], float)
    assert is_strictly_convex(sq)
    assert polygon_area(sq) == pytest.approx(1.0)
    assert not is_strictly_convex(sq[::-1])
    flat = np.array([[0, 0], [1, 0], [2, 0], [1, 1]], float)
    assert not is_strictly_convex(flat)
    assert polygon_is_simple(sq)
    assert not polygon_is_simple(np.array([[0, 0], [1, 1], [1, 0], [0, 1]], float))


def test_interior_angle():
    sq = np.array([[0, 0], [1, 0], [1, 1], [0, 1]], float)
    assert interior_angle(sq, 0) == pytest.approx(np.pi / 2, abs=1e-15)
    notch = np.array([[0, 0], [2, 0], [2, 2], [1, 1], [0, 2]], float)
    assert interior_angle(notch, 3) == pytest.approx(1.5 * np.pi, abs=1e-14)


def test_random_convex_polygon(rng):
    for _ in range(50):
        m = int(rng.integers(3, 20))
        assert is_strictly_convex(random_convex_polygon(m, rng))


def _square_with_center():
    tri = DiskTriangulation(5, (0, 1, 2, 3), [[0, 1, 4], [1, 2, 4], [2, 3, 4], [3, 0, 4]])
    sq = np.array([[0, 0], [1, 0], [1, 1], [0, 1]], float)
    return tri, BoundaryFixing(tri.boundary, sq)


def test_verify_detects_flip():
    tri, fix = _square_with_center()
    pos = np.vstack([fix.positions, [0.5, 0.5]])
    emb = GeodesicEmbedding(tri, pos, fix)
    assert verify_embedding(emb, paranoid=True).passed
    assert in_convex_hull_of_neighbors(emb, 4)
    bad = emb.with_positions(np.vstack([fix.positions, [1.5, 0.5]]))
    rep = verify_embedding(bad, paranoid=True)
    assert not rep.passed and rep.failures
    assert not in_convex_hull_of_neighbors(bad, 4)
    # on an edge: degenerate faces
    assert not verify_embedding(emb.with_positions(np.vstack([fix.positions, [0.5, 0.0]])))


def test_boundary_mismatch():
    tri, fix = _square_with_center()
    pos = np.vstack([fix.positions + 0.1, [0.5, 0.5]])
    with pytest.raises(MismatchedBoundary):
        verify_embedding(GeodesicEmbedding(tri, pos, fix))


def test_verify_random_tutte(rng):
    for _ in range(20):
        emb = random_embedding(rng, max_interior=80)
        assert verify_embedding(emb, paranoid=True).passed
        assert all(in_convex_hull_of_neighbors(emb, v) for v in emb.tri.interior_vertices.tolist())
