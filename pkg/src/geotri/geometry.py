"""Planar predicates and verification of geodesic triangulations."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np

from .mesh import DiskTriangulation

#: Absolute threshold below which twice a signed area counts as zero.
ORIENT_EPS = 1e-12

_ERRBOUND = 4.0 * np.finfo(float).eps


class MismatchedBoundary(ValueError):
    pass


class DegeneratePolygon(ValueError):
    pass


def _orient_det(a, b, c) -> float:
    """Twice the signed area of (a, b, c), exact in sign when it matters."""
    ax, ay = float(a[0]), float(a[1])
    bx, by = float(b[0]), float(b[1])
    cx, cy = float(c[0]), float(c[1])
    left = (bx - ax) * (cy - ay)
    right = (by - ay) * (cx - ax)
    det = left - right
    if abs(det) > _ERRBOUND * (abs(left) + abs(right)):
        return det
    fa = (Fraction(ax), Fraction(ay))
    fb = (Fraction(bx), Fraction(by))
    fc = (Fraction(cx), Fraction(cy))
    exact = (fb[0] - fa[0]) * (fc[1] - fa[1]) - (fb[1] - fa[1]) * (fc[0] - fa[0])
    if exact and not float(exact):
        # keep the sign when the value underflows
        return math.copysign(5e-324, exact)
    return float(exact)


def orient2d(a, b, c, eps: float = 0.0) -> int:
    """Sign of the orientation of ``(a, b, c)``: +1 counterclockwise, -1 clockwise.

    Returns 0 when twice the signed area is at most ``eps`` in magnitude
    (``eps=0`` gives the exact sign).
    """
    det = _orient_det(a, b, c)
    if abs(det) <= eps:
        return 0
    return 1 if det > 0 else -1


def face_determinants(positions, faces) -> np.ndarray:
    """Twice the signed area of each face. ``positions`` may carry leading batch axes."""
    p = np.asarray(positions, dtype=float)
    f = np.asarray(faces)
    a, b, c = p[..., f[:, 0], :], p[..., f[:, 1], :], p[..., f[:, 2], :]
    return ((b[..., 0] - a[..., 0]) * (c[..., 1] - a[..., 1])
            - (b[..., 1] - a[..., 1]) * (c[..., 0] - a[..., 0]))


def polygon_area(points) -> float:
    p = np.asarray(points, dtype=float)
    x, y = p[:, 0], p[:, 1]
    return 0.5 * math.fsum(x * np.roll(y, -1) - np.roll(x, -1) * y)


def is_strictly_convex(points, eps: float = ORIENT_EPS) -> bool:
    """True if ``points`` form a counterclockwise strictly convex polygon."""
    p = np.asarray(points, dtype=float)
    n = len(p)
    if n < 3:
        return False
    for i in range(n):
        if orient2d(p[i - 1], p[i], p[(i + 1) % n], eps) <= 0:
            return False
    # turning number one, so no self-overlap
    turn = 0.0
    for i in range(n):
        d0 = p[i] - p[i - 1]
        d1 = p[(i + 1) % n] - p[i]
        turn += math.atan2(d0[0] * d1[1] - d0[1] * d1[0], d0 @ d1)
    return abs(turn - 2 * math.pi) < 1e-6


def segments_cross(p1, p2, q1, q2, eps: float = ORIENT_EPS) -> bool:
    """Closed segments p1p2 and q1q2 meet (touching counts)."""
    o1 = orient2d(p1, p2, q1, eps)
    o2 = orient2d(p1, p2, q2, eps)
    o3 = orient2d(q1, q2, p1, eps)
    o4 = orient2d(q1, q2, p2, eps)
    if o1 * o2 < 0 and o3 * o4 < 0:
        return True

    def on_seg(a, b, c):
        return (min(a[0], b[0]) <= c[0] <= max(a[0], b[0])
                and min(a[1], b[1]) <= c[1] <= max(a[1], b[1]))

    return ((o1 == 0 and on_seg(p1, p2, q1)) or (o2 == 0 and on_seg(p1, p2, q2))
            or (o3 == 0 and on_seg(q1, q2, p1)) or (o4 == 0 and on_seg(q1, q2, p2)))


def polygon_is_simple(points) -> bool:
    p = np.asarray(points, dtype=float)
    n = len(p)
    for i in range(n):
        for j in range(i + 1, n):
            if j == i + 1 or (i == 0 and j == n - 1):
                continue
            if segments_cross(p[i], p[(i + 1) % n], p[j], p[(j + 1) % n], eps=0.0):
                return False
    return True


@dataclass(frozen=True, eq=False)
class BoundaryFixing:
    """Positions of the boundary cycle (the polygon)."""

    ids: tuple
    positions: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "ids", tuple(int(i) for i in self.ids))
        pos = np.array(self.positions, dtype=float).reshape(-1, 2)
        if len(pos) != len(self.ids):
            raise ValueError("one position per boundary vertex required")
        if not np.all(np.isfinite(pos)):
            raise ValueError("non-finite boundary position")
        pos.setflags(write=False)
        object.__setattr__(self, "positions", pos)

    @cached_property
    def strictly_convex(self) -> bool:
        return is_strictly_convex(self.positions)

    @cached_property
    def area(self) -> float:
        return polygon_area(self.positions)

    @cached_property
    def diameter(self) -> float:
        p = self.positions
        d = p[:, None, :] - p[None, :, :]
        return float(np.sqrt((d ** 2).sum(-1)).max())

    def to_dict(self) -> dict:
        return {"boundary": list(self.ids), "positions": self.positions.tolist()}

    @classmethod
    def from_dict(cls, doc) -> "BoundaryFixing":
        return cls(doc["boundary"], doc["positions"])


@dataclass(frozen=True, eq=False)
class GeodesicEmbedding:
    """Vertex positions of a triangulation with fixed boundary."""

    tri: DiskTriangulation
    positions: np.ndarray = field(repr=False)
    boundary: BoundaryFixing = field(repr=False)

    def __post_init__(self):
        pos = np.array(self.positions, dtype=float).reshape(-1, 2)
        if len(pos) != self.tri.vertex_count:
            raise ValueError("one position per vertex required")
        pos.setflags(write=False)
        object.__setattr__(self, "positions", pos)
        if tuple(self.boundary.ids) != tuple(self.tri.boundary):
            raise ValueError("boundary fixing does not follow the boundary cycle")

    @classmethod
    def from_positions(cls, tri, positions) -> "GeodesicEmbedding":
        pos = np.asarray(positions, dtype=float)
        return cls(tri, pos, BoundaryFixing(tri.boundary, pos[list(tri.boundary)]))

    def with_positions(self, positions) -> "GeodesicEmbedding":
        return GeodesicEmbedding(self.tri, positions, self.boundary)

    @property
    def interior_positions(self) -> np.ndarray:
        return self.positions[self.tri.interior_vertices]

    @cached_property
    def face_dets(self) -> np.ndarray:
        return face_determinants(self.positions, self.tri.faces)


@dataclass
class VerifyReport:
    passed: bool
    failures: list = field(default_factory=list)

    def __bool__(self):
        return self.passed

    def to_dict(self) -> dict:
        return {"pass": bool(self.passed), "failures": list(self.failures)}


def _crossing_pairs(positions, edges, eps):
    """All pairs of edges without a shared endpoint that meet."""
    e = np.asarray(edges)
    p = positions
    a, b = p[e[:, 0]], p[e[:, 1]]

    def orient(u, v, w):
        return ((v[..., 0] - u[..., 0]) * (w[..., 1] - u[..., 1])
                - (v[..., 1] - u[..., 1]) * (w[..., 0] - u[..., 0]))

    hits = []
    for i in range(len(e)):
        rest = slice(i + 1, None)
        shared = ((e[rest] == e[i, 0]) | (e[rest] == e[i, 1])).any(axis=1)
        o1 = orient(a[i], b[i], a[rest])
        o2 = orient(a[i], b[i], b[rest])
        o3 = orient(a[rest], b[rest], a[i])
        o4 = orient(a[rest], b[rest], b[i])
        s1 = np.where(np.abs(o1) <= eps, 0, np.sign(o1))
        s2 = np.where(np.abs(o2) <= eps, 0, np.sign(o2))
        s3 = np.where(np.abs(o3) <= eps, 0, np.sign(o3))
        s4 = np.where(np.abs(o4) <= eps, 0, np.sign(o4))
        cand = (s1 * s2 <= 0) & (s3 * s4 <= 0) & ~shared
        for j in np.flatnonzero(cand).tolist():
            k = i + 1 + j
            if segments_cross(a[i], b[i], a[k], b[k], eps):
                hits.append((tuple(e[i].tolist()), tuple(e[k].tolist())))
    return hits


def verify_embedding(emb: GeodesicEmbedding, paranoid: bool = False,
                     eps: float = ORIENT_EPS, area_rtol: float = 1e-9) -> VerifyReport:
    """Check that ``emb`` is a geodesic triangulation.

    Passes iff every face is strictly counterclockwise (twice the area above
    ``eps``) and the faces tile the boundary polygon by area. With
    ``paranoid=True`` every pair of edges is also tested for crossings.

    Raises
    ------
    MismatchedBoundary
        If a boundary vertex is not where the boundary fixing puts it.
    """
    tri = emb.tri
    bids = list(tri.boundary)
    moved = np.flatnonzero(np.any(emb.positions[bids] != emb.boundary.positions, axis=1))
    if moved.size:
        raise MismatchedBoundary(f"boundary vertices moved: {[bids[i] for i in moved]}")

    failures = []
    if not np.all(np.isfinite(emb.positions)):
        failures.append({"kind": "non-finite", "vertex": None, "detail": "non-finite position"})
        return VerifyReport(False, failures)

    dets = emb.face_dets
    for fi in np.flatnonzero(dets <= eps).tolist():
        face = tri.faces[fi].tolist()
        # re-decide borderline cases with the exact predicate
        p = emb.positions
        if orient2d(p[face[0]], p[face[1]], p[face[2]], eps) > 0:
            continue
        kind = "degenerate" if abs(dets[fi]) <= eps else "inverted"
        failures.append({"kind": kind, "face": face, "detail": float(dets[fi])})

    total = 0.5 * math.fsum(dets.tolist())
    area = emb.boundary.area
    if abs(total - area) > area_rtol * max(abs(area), 1e-300):
        failures.append({"kind": "area", "face": None,
                         "detail": f"faces cover {total!r}, polygon area {area!r}"})

    if paranoid:
        for e1, e2 in _crossing_pairs(emb.positions, tri.edges, eps):
            failures.append({"kind": "crossing", "face": None, "detail": [list(e1), list(e2)]})

    return VerifyReport(not failures, failures)


def in_convex_hull_of_neighbors(emb: GeodesicEmbedding, v: int) -> bool:
    """True iff vertex ``v`` lies strictly inside the convex hull of its neighbors."""
    p = emb.positions[v]
    q = emb.positions[emb.tri.neighbors[v]] - p
    if np.any(np.all(q == 0, axis=1)):
        return False
    ang = np.sort(np.arctan2(q[:, 1], q[:, 0]))
    gaps = np.diff(np.concatenate([ang, ang[:1] + 2 * np.pi]))
    # strictly inside iff every angular gap is below pi
    return bool(gaps.max() < np.pi - 1e-12)


def interior_angle(polygon, at: int) -> float:
    """Interior angle of a counterclockwise simple polygon at vertex ``at``.

    Reflex angles are returned as values in (pi, 2*pi).
    """
    p = np.asarray(polygon, dtype=float)
    n = len(p)
    v, prev, nxt = p[at], p[(at - 1) % n], p[(at + 1) % n]
    d_next, d_prev = nxt - v, prev - v
    if not np.any(d_next) or not np.any(d_prev):
        raise DegeneratePolygon(f"repeated point at index {at}")
    cross = d_next[0] * d_prev[1] - d_next[1] * d_prev[0]
    ang = math.atan2(cross, float(d_next @ d_prev))
    return ang if ang > 0 else ang + 2 * math.pi


def random_convex_polygon(m: int, rng=None, min_gap: float = 0.2) -> np.ndarray:
    """``m`` counterclockwise points on a randomly stretched and rotated circle.

    Angular gaps are at least ``min_gap`` times the mean gap, so the polygon
    is strictly convex with no nearly flat corner.
    """
    rng = np.random.default_rng(rng)
    gaps = min_gap + rng.random(m)
    ang = np.cumsum(gaps / gaps.sum() * 2 * np.pi) + rng.uniform(0, 2 * np.pi)
    pts = np.column_stack([np.cos(ang), np.sin(ang)])
    th = rng.uniform(0, np.pi)
    rot = np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]])
    stretch = np.diag([1.0, rng.uniform(0.4, 1.0)])
    return pts @ (rot @ stretch @ rot.T).T + rng.normal(scale=0.1, size=2)
