import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from geotri.curved import (EquatorOrBelow, OutsideDisk, gnomonic, gnomonic_inverse,
                           hyperbolic_distance_klein, klein_chart, klein_inverse,
                           klein_to_hyperboloid, lift_space_equivalence,
                           random_hyperbolic_polygon, random_spherical_polygon,
                           spherical_distance)
from geotri.mesh import random_disk_triangulation


def _collinear(pts):
    d = pts - pts[0]
    return np.abs(d[:, 0] * d[-1, 1] - d[:, 1] * d[-1, 0]).max()


@settings(max_examples=200, deadline=None)
@given(st.floats(0, 2 * np.pi), st.floats(0.0, 1.4))
def test_gnomonic_roundtrip(phi, polar):
    p = np.array([np.sin(polar) * np.cos(phi), np.sin(polar) * np.sin(phi), np.cos(polar)])
    assert np.abs(gnomonic_inverse(gnomonic(p)) - p).max() <= 1e-12


@settings(max_examples=200, deadline=None)
@given(st.floats(-50, 50), st.floats(-50, 50))
def test_gnomonic_inverse_roundtrip(x, y):
    q = np.array([x, y])
    assert np.abs(gnomonic(gnomonic_inverse(q)) - q).max() <= 1e-12 * max(1, abs(x), abs(y))


def test_great_circles_become_lines(rng):
    for _ in range(20):
        a, b = random_spherical_polygon(3, rng)[:2]
        s = np.linspace(0, 1, 11)[:, None]
        theta = spherical_distance(a, b)
        arc = (np.sin((1 - s) * theta) * a + np.sin(s * theta) * b) / np.sin(theta)
        assert _collinear(gnomonic(arc)) < 1e-12


def test_hyperbolic_geodesics_become_chords(rng):
    for _ in range(20):
        p, q = random_hyperbolic_polygon(3, rng)[:2]
        u, v = klein_to_hyperboloid(p), klein_to_hyperboloid(q)
        d = hyperbolic_distance_klein(p, q)
        s = np.linspace(0, 1, 11)[:, None]
        curve = (np.sinh((1 - s) * d) * u + np.sinh(s * d) * v) / np.sinh(d)
        assert _collinear(curve[:, :2] / curve[:, 2:]) < 1e-10


def test_distance_from_origin():
    for r in (0.1, 0.5, 0.9):
        assert hyperbolic_distance_klein([0, 0], [r, 0]) == pytest.approx(np.arctanh(r), rel=1e-12)


def test_chart_domains():
    with pytest.raises(OutsideDisk):
        klein_chart([1.0, 0.0])
    with pytest.raises(EquatorOrBelow):
        gnomonic([1.0, 0.0, 0.0])
    assert np.array_equal(klein_inverse([0.2, 0.3]), [0.2, 0.3])


@pytest.mark.parametrize("model", ["klein", "gnomonic"])
def test_lift(model, rng):
    for _ in range(5):
        m = int(rng.integers(3, 9))
        poly = random_hyperbolic_polygon(m, rng) if model == "klein" else random_spherical_polygon(m, rng)
        tri = random_disk_triangulation(m, int(rng.integers(1, 40)), rng=rng)
        rep = lift_space_equivalence(tri, poly, model, samples=5, rng=rng)
        assert rep.passed, rep.failures
        assert rep.roundtrip_error <= 1e-12
