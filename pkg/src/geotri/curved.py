"""Klein and gnomonic charts: curved convex polygons as planar ones.

In the Klein disk hyperbolic geodesics are Euclidean chords, and central
(gnomonic) projection of the open upper hemisphere onto the tangent plane at
the north pole sends great-circle arcs to segments. Both charts therefore
carry geodesic triangulations to planar ones and back.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import BoundaryFixing, GeodesicEmbedding, is_strictly_convex, verify_embedding
from .mesh import DiskTriangulation
from .tutte import random_weights, tutte_solve


class OutsideDisk(ValueError):
    pass


class EquatorOrBelow(ValueError):
    pass


def klein_chart(p) -> np.ndarray:
    """Klein disk point to chart coordinates (the identity on ``x, y``)."""
    p = np.asarray(p, dtype=float)
    if np.any(np.sum(p * p, axis=-1) >= 1.0):
        raise OutsideDisk("point not strictly inside the unit disk")
    return p.copy()


def klein_inverse(q) -> np.ndarray:
    return klein_chart(q)


def gnomonic(p) -> np.ndarray:
    """Unit vectors with ``Z > 0`` to the tangent plane at the north pole."""
    p = np.asarray(p, dtype=float)
    if np.any(p[..., 2] <= 0):
        raise EquatorOrBelow("gnomonic projection needs Z > 0")
    return p[..., :2] / p[..., 2:3]


def gnomonic_inverse(q) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    x = np.concatenate([q, np.ones(q.shape[:-1] + (1,))], axis=-1)
    return x / np.linalg.norm(x, axis=-1, keepdims=True)


# geodesic predicates computed intrinsically, used to cross-check the charts

def sphere_orient(a, b, c) -> float:
    """Sign of det[a, b, c]: which side of the great circle ab the point c is on."""
    return float(np.linalg.det(np.array([a, b, c], dtype=float)))


def _minkowski(u, v):
    return u[..., 0] * v[..., 0] + u[..., 1] * v[..., 1] - u[..., 2] * v[..., 2]


def klein_to_hyperboloid(p) -> np.ndarray:
    p = klein_chart(p)
    g = 1.0 / np.sqrt(1.0 - np.sum(p * p, axis=-1, keepdims=True))
    return np.concatenate([g * p, g], axis=-1)


def hyperbolic_distance_klein(p, q) -> float:
    u, v = klein_to_hyperboloid(p), klein_to_hyperboloid(q)
    return float(np.arccosh(max(1.0, -_minkowski(u, v))))


def spherical_distance(a, b) -> float:
    return float(np.arctan2(np.linalg.norm(np.cross(a, b)), np.dot(a, b)))


@dataclass
class LiftReport:
    model: str
    passed: bool
    samples: int
    roundtrip_error: float
    failures: list = field(default_factory=list)

    def __bool__(self):
        return self.passed

    def to_dict(self) -> dict:
        return {"model": self.model, "pass": self.passed, "samples": self.samples,
                "roundtrip_error": self.roundtrip_error, "failures": self.failures}


def _curved_face_ok(model, pts) -> bool:
    # non-degenerate, correctly oriented geodesic triangle, decided intrinsically
    if model == "gnomonic":
        return sphere_orient(*pts) > 1e-12
    # hyperbolic: orientation in the hyperboloid model; the plane through the
    # origin and two hyperboloid points projects to the Klein chord
    u = np.asarray(pts)
    return float(np.linalg.det(u)) > 1e-12


def lift_space_equivalence(tri: DiskTriangulation, boundary, model: str = "klein",
                           samples: int = 50, rng=None) -> LiftReport:
    """Sample curved geodesic triangulations through the chart and check both directions.

    ``boundary`` is given in the curved model: Klein disk points for
    ``"klein"``, unit vectors with ``Z > 0`` for ``"gnomonic"``. The curved
    polygon must be convex in the chart. For each sample a random planar
    Tutte embedding is pulled back; the curved faces are checked with
    intrinsic orientation tests and pushed forward again.
    """
    rng = np.random.default_rng(rng)
    bnd = np.asarray(boundary, dtype=float)
    fwd = klein_chart if model == "klein" else gnomonic
    back = klein_inverse if model == "klein" else gnomonic_inverse
    lift = klein_to_hyperboloid if model == "klein" else (lambda q: q)
    planar = fwd(bnd)
    if not is_strictly_convex(planar):
        raise ValueError("curved polygon is not convex in the chart")
    fix = BoundaryFixing(tri.boundary, planar)
    failures, err = [], 0.0
    for s in range(samples):
        emb = tutte_solve(tri, fix, random_weights(tri, rng))
        if not verify_embedding(emb).passed:
            failures.append({"sample": s, "stage": "planar"})
            continue
        curved = back(emb.positions)
        again = fwd(curved)
        err = max(err, float(np.abs(again - emb.positions).max()))
        pts = lift(curved)
        # the boundary pulled back lands on the given curved polygon
        if np.abs(curved[list(tri.boundary)] - bnd).max() > 1e-12:
            failures.append({"sample": s, "stage": "boundary"})
        bad = [f for f in tri.faces.tolist() if not _curved_face_ok(model, pts[f])]
        if bad:
            failures.append({"sample": s, "stage": "curved", "faces": bad[:5]})
        # and back: the pushed-forward curved triangulation verifies in the plane
        if not verify_embedding(GeodesicEmbedding.from_positions(tri, again)).passed:
            failures.append({"sample": s, "stage": "pushforward"})
    return LiftReport(model, not failures and err <= 1e-12, samples, err, failures)


def random_hyperbolic_polygon(m: int, rng=None, rmax: float = 0.95) -> np.ndarray:
    """Convex polygon in the Klein disk, vertices at random angles and radii."""
    rng = np.random.default_rng(rng)
    while True:
        ang = np.sort(rng.uniform(0, 2 * np.pi, m))
        r = rng.uniform(0.3, rmax, m)
        pts = np.column_stack([r * np.cos(ang), r * np.sin(ang)])
        if is_strictly_convex(pts):
            return pts


def random_spherical_polygon(m: int, rng=None, max_polar: float = np.radians(70)) -> np.ndarray:
    """Convex spherical polygon strictly inside the upper hemisphere.

    A random rotation about the Z axis is applied; convexity is checked in
    the gnomonic chart.
    """
    rng = np.random.default_rng(rng)
    while True:
        ang = np.sort(rng.uniform(0, 2 * np.pi, m))
        polar = rng.uniform(np.radians(10), max_polar, m)
        pts = np.column_stack([np.sin(polar) * np.cos(ang), np.sin(polar) * np.sin(ang),
                               np.cos(polar)])
        if is_strictly_convex(gnomonic(pts)):
            return pts
