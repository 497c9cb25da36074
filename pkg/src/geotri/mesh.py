"""Combinatorial triangulations of the closed disk.

A :class:`DiskTriangulation` stores only combinatorics: a vertex count, the
boundary cycle (counterclockwise) and a list of counterclockwise faces.
Vertex ids are dense integers ``0..vertex_count-1``.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import NamedTuple

import numpy as np


class EdgeKind(str, Enum):
    BOUNDARY = "boundary"
    INTERIOR = "interior"
    DIVIDING = "dividing"


def _edge(i, j):
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True, eq=False)
class DiskTriangulation:
    """Triangulation of a disk.

    Parameters
    ----------
    vertex_count : int
        Number of vertices.
    boundary : sequence of int
        Boundary cycle in counterclockwise order (not repeated at the end).
    faces : array_like, shape (F, 3)
        Counterclockwise vertex triples.
    """

    vertex_count: int
    boundary: tuple
    faces: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "boundary", tuple(int(b) for b in self.boundary))
        faces = np.asarray(self.faces, dtype=np.int64).reshape(-1, 3)
        faces.setflags(write=False)
        object.__setattr__(self, "faces", faces)

    @cached_property
    def boundary_set(self) -> frozenset:
        return frozenset(self.boundary)

    @cached_property
    def is_boundary(self) -> np.ndarray:
        mask = np.zeros(self.vertex_count, dtype=bool)
        mask[list(self.boundary)] = True
        return mask

    @cached_property
    def interior_vertices(self) -> np.ndarray:
        return np.flatnonzero(~self.is_boundary)

    @cached_property
    def boundary_vertices(self) -> np.ndarray:
        return np.asarray(self.boundary, dtype=np.int64)

    @cached_property
    def edge_faces(self) -> dict:
        """Map undirected edge -> list of incident face indices."""
        inc = defaultdict(list)
        for fi, (a, b, c) in enumerate(self.faces.tolist()):
            for u, v in ((a, b), (b, c), (c, a)):
                inc[_edge(u, v)].append(fi)
        return dict(inc)

    @cached_property
    def edges(self) -> list:
        return sorted(self.edge_faces)

    @cached_property
    def boundary_edges(self) -> frozenset:
        b = self.boundary
        return frozenset(_edge(b[i], b[(i + 1) % len(b)]) for i in range(len(b)))

    def edge_kind(self, i, j) -> EdgeKind:
        e = _edge(i, j)
        if e in self.boundary_edges:
            return EdgeKind.BOUNDARY
        if e[0] in self.boundary_set and e[1] in self.boundary_set:
            return EdgeKind.DIVIDING
        return EdgeKind.INTERIOR

    @cached_property
    def interior_edges(self) -> list:
        return [e for e in self.edges if e not in self.boundary_edges]

    @cached_property
    def dividing_edges(self) -> list:
        return [e for e in self.interior_edges
                if e[0] in self.boundary_set and e[1] in self.boundary_set]

    @cached_property
    def neighbors(self) -> list:
        nb = [set() for _ in range(self.vertex_count)]
        for a, b in self.edges:
            nb[a].add(b)
            nb[b].add(a)
        return [sorted(s) for s in nb]

    def degree(self, v) -> int:
        return len(self.neighbors[v])

    @cached_property
    def rings(self) -> dict:
        """Counterclockwise neighbor cycle of every interior vertex."""
        succ = defaultdict(dict)
        for a, b, c in self.faces.tolist():
            succ[a][b] = c
            succ[b][c] = a
            succ[c][a] = b
        rings = {}
        for v in self.interior_vertices.tolist():
            nxt = succ[v]
            start = min(nxt)
            ring = [start]
            cur = nxt[start]
            while cur != start and len(ring) <= len(nxt):
                ring.append(cur)
                cur = nxt.get(cur, start)
            rings[v] = ring
        return rings

    # counts used all over the place
    @property
    def n_interior(self) -> int:
        return len(self.interior_vertices)

    @property
    def n_boundary(self) -> int:
        return len(self.boundary)

    @property
    def n_faces(self) -> int:
        return len(self.faces)

    def to_dict(self) -> dict:
        return {
            "vertices": int(self.vertex_count),
            "boundary": list(self.boundary),
            "faces": self.faces.tolist(),
        }

    @classmethod
    def from_dict(cls, doc) -> "DiskTriangulation":
        return cls(int(doc["vertices"]), doc["boundary"], doc["faces"])


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok

    def to_dict(self) -> dict:
        return {"pass": self.ok, "violations": list(self.violations)}


def validate_combinatorics(tri: DiskTriangulation) -> ValidationReport:
    """Check that ``tri`` is a valid triangulation of a disk.

    Every problem found is appended to the report; nothing is raised.
    """
    out = []
    nv = tri.vertex_count
    faces = tri.faces
    b = tri.boundary

    if len(b) < 3:
        out.append(f"boundary cycle too short: {len(b)}")
    if len(set(b)) != len(b):
        out.append("boundary cycle repeats a vertex")
    if faces.size and (faces.min() < 0 or faces.max() >= nv):
        out.append("face references a vertex id out of range")
        return ValidationReport(out)
    if any(v < 0 or v >= nv for v in b):
        out.append("boundary references a vertex id out of range")
        return ValidationReport(out)

    for fi, (p, q, r) in enumerate(faces.tolist()):
        if len({p, q, r}) < 3:
            out.append(f"degenerate face {fi}: {(p, q, r)}")
    seen_faces = Counter(frozenset(f) for f in faces.tolist())
    for f, cnt in seen_faces.items():
        if cnt > 1 and len(f) == 3:
            out.append(f"duplicate face {tuple(sorted(f))} appears {cnt} times")

    used = np.zeros(nv, dtype=bool)
    used[faces.ravel()] = True
    for v in np.flatnonzero(~used).tolist():
        out.append(f"vertex {v} is in no face")

    directed = Counter()
    for p, q, r in faces.tolist():
        for u, v in ((p, q), (q, r), (r, p)):
            directed[(u, v)] += 1
    for (u, v), cnt in directed.items():
        if cnt > 1:
            out.append(f"inconsistent orientation: directed edge {(u, v)} used {cnt} times")

    bedges = tri.boundary_edges
    for e, fs in tri.edge_faces.items():
        if len(fs) > 2:
            out.append(f"non-manifold edge {e}: {len(fs)} faces")
        elif len(fs) == 1 and e not in bedges:
            out.append(f"edge {e} has one face but is not on the boundary cycle")
        elif len(fs) == 2 and e in bedges:
            out.append(f"boundary edge {e} is shared by two faces")
    for i in range(len(b)):
        u, v = b[i], b[(i + 1) % len(b)]
        if _edge(u, v) not in tri.edge_faces:
            out.append(f"boundary edge {(u, v)} is in no face")
        elif directed.get((u, v), 0) != 1:
            out.append(f"boundary edge {(u, v)} is not traversed counterclockwise by its face")

    if out:
        return ValidationReport(out)

    # vertex links: interior vertices need a closed cycle, boundary ones a path
    succ = defaultdict(dict)
    for p, q, r in faces.tolist():
        succ[p][q] = r
        succ[q][r] = p
        succ[r][p] = q
    bset = tri.boundary_set
    for v in range(nv):
        nxt = succ[v]
        if v in bset:
            starts = set(nxt) - set(nxt.values())
            if len(starts) != 1:
                out.append(f"boundary vertex {v} link is not a single path")
                continue
            cur, seen = starts.pop(), 1
            while cur in nxt:
                cur = nxt[cur]
                seen += 1
                if seen > len(nxt) + 1:
                    break
            if seen != len(nxt) + 1:
                out.append(f"boundary vertex {v} link is not a single path")
        else:
            if set(nxt) != set(nxt.values()):
                out.append(f"interior vertex {v} link is not closed")
                continue
            start = next(iter(nxt))
            cur, seen = nxt[start], 1
            while cur != start and seen <= len(nxt):
                cur = nxt[cur]
                seen += 1
            if seen != len(nxt):
                out.append(f"interior vertex {v} link is not a single cycle")

    nV, nE, nF = nv, len(tri.edge_faces), len(faces)
    if nV - nE + nF != 1:
        out.append(f"Euler characteristic {nV - nE + nF} != 1")
    if nF != 2 * tri.n_interior + tri.n_boundary - 2:
        out.append("face count differs from 2|V_I| + |V_B| - 2")
    if len(tri.interior_edges) - 3 * tri.n_interior != len(bedges) - 3:
        out.append("|E_I| - 3|V_I| differs from |E_B| - 3")
    return ValidationReport(out)


class WeightDofs(NamedTuple):
    direct: int
    edge_formula: int


def count_weight_dofs(tri: DiskTriangulation) -> WeightDofs:
    """Free parameters of normalized interior weights.

    ``direct`` is the sum of interior degrees minus the number of interior
    vertices (one normalization per row). ``edge_formula`` is ``2|E_I| - |V_I|``,
    returned alongside for comparison; the two generally differ.
    """
    inner = tri.interior_vertices.tolist()
    direct = sum(tri.degree(v) for v in inner) - len(inner)
    return WeightDofs(direct, 2 * len(tri.interior_edges) - len(inner))


def dimension_of_x(tri: DiskTriangulation) -> int:
    return 2 * tri.n_interior


# -- random triangulations -------------------------------------------------

def fan_triangulation(m: int) -> DiskTriangulation:
    faces = [(0, i, i + 1) for i in range(1, m - 1)]
    return DiskTriangulation(m, tuple(range(m)), faces)


def random_disk_triangulation(n_boundary, n_interior, rng=None, flips=None,
                              regular: bool = True, split: str = "area") -> DiskTriangulation:
    """Random disk triangulation with the given vertex counts.

    Starts from a fan of the boundary polygon, splits faces 1-to-3 to create
    interior vertices, then applies random legal edge flips.

    ``split="area"`` realizes the fan on a regular polygon and picks the
    face to split with probability proportional to its area, placing the new
    vertex at a random interior point; ``split="uniform"`` picks faces
    uniformly, which nests many splits inside a few faces, and the Tutte
    drawings of such maps can contain faces far below double-precision
    resolution. With ``regular=True`` a flip is only kept when it moves
    vertex degrees toward 6 (interior) and 4 (boundary).
    """
    rng = np.random.default_rng(rng)
    if n_boundary < 3:
        raise ValueError("need at least 3 boundary vertices")
    if split not in ("area", "uniform"):
        raise ValueError(f"unknown split rule {split!r}")
    faces = [(0, i, i + 1) for i in range(1, n_boundary - 1)]
    nv = n_boundary
    ang = 2 * np.pi * np.arange(n_boundary) / n_boundary
    pos = np.zeros((n_boundary + n_interior, 2))
    pos[:n_boundary] = np.column_stack([np.cos(ang), np.sin(ang)])

    def area(f):
        a, b, c = pos[list(f)]
        return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))

    areas = [area(f) for f in faces]
    for _ in range(n_interior):
        if split == "area":
            w = np.asarray(areas)
            fi = int(rng.choice(len(faces), p=w / w.sum()))
        else:
            fi = int(rng.integers(len(faces)))
        a, b, c = faces[fi]
        v = nv
        nv += 1
        # random point away from the edges
        lam = rng.dirichlet((4.0, 4.0, 4.0))
        pos[v] = lam @ pos[[a, b, c]]
        faces[fi] = (a, b, v)
        faces.append((b, c, v))
        faces.append((c, a, v))
        areas[fi] = area(faces[fi])
        areas += [area(faces[-2]), area(faces[-1])]

    if flips is None:
        flips = 3 * len(faces)
    is_bnd = np.zeros(nv, dtype=bool)
    is_bnd[:n_boundary] = True
    # directed edge -> face index; each interior edge appears in both directions
    owner = {}
    for fi, (a, b, c) in enumerate(faces):
        owner[(a, b)] = fi
        owner[(b, c)] = fi
        owner[(c, a)] = fi
    deg = np.zeros(nv, dtype=np.int64)
    for (u, v) in {_edge(*e) for e in owner}:
        deg[u] += 1
        deg[v] += 1

    def third(fi, u, v):
        for w in faces[fi]:
            if w != u and w != v:
                return w

    keys = None
    for step in range(flips):
        if keys is None or step % 64 == 0:
            keys = [e for e in owner if (e[1], e[0]) in owner and e[0] < e[1]]
        if not keys:
            break
        u, v = keys[int(rng.integers(len(keys)))]
        if (u, v) not in owner or (v, u) not in owner:
            continue
        f1, f2 = owner[(u, v)], owner[(v, u)]
        a, b = third(f1, u, v), third(f2, v, u)
        if a == b or (a, b) in owner or (b, a) in owner:
            continue
        if (not is_bnd[u] and deg[u] <= 3) or (not is_bnd[v] and deg[v] <= 3):
            continue
        if regular:
            tgt = [4 if is_bnd[x] else 6 for x in (u, v, a, b)]
            cur = [deg[u], deg[v], deg[a], deg[b]]
            new = [deg[u] - 1, deg[v] - 1, deg[a] + 1, deg[b] + 1]
            if (sum((x - t) ** 2 for x, t in zip(new, tgt))
                    >= sum((x - t) ** 2 for x, t in zip(cur, tgt))):
                continue
        for e in ((u, v), (v, a), (a, u), (v, u), (u, b), (b, v)):
            owner.pop(e, None)
        faces[f1] = (a, u, b)
        faces[f2] = (b, v, a)
        for fi in (f1, f2):
            p, q, r = faces[fi]
            owner[(p, q)] = fi
            owner[(q, r)] = fi
            owner[(r, p)] = fi
        deg[u] -= 1
        deg[v] -= 1
        deg[a] += 1
        deg[b] += 1
    return DiskTriangulation(nv, tuple(range(n_boundary)), faces)
