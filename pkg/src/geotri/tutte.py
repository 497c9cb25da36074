"""Permissible weights and Tutte's convex-combination embedding."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import splu

from .geometry import BoundaryFixing, GeodesicEmbedding
from .mesh import DiskTriangulation


class NonPositiveWeight(ValueError):
    pass


class SingularSystem(RuntimeError):
    pass


class NonConvexBoundary(UserWarning):
    """The solve ran, but no embedding guarantee applies."""


@dataclass(frozen=True, eq=False)
class WeightMatrix:
    """Row-normalized positive weights on directed edges out of interior vertices.

    ``matrix`` is a ``(V, V)`` CSR matrix whose nonzero rows are the interior
    vertices; entry ``(i, j)`` is the weight of neighbor ``j`` in the convex
    combination for ``i``. The unit diagonal of the permissible-weight
    convention is implicit (see :attr:`diagonal`) and never stored.
    """

    tri: DiskTriangulation
    matrix: sparse.csr_matrix = field(repr=False)

    @property
    def diagonal(self) -> np.ndarray:
        d = np.zeros(self.tri.vertex_count)
        d[self.tri.interior_vertices] = 1.0
        return d

    def row(self, i) -> dict:
        m = self.matrix
        lo, hi = m.indptr[i], m.indptr[i + 1]
        return dict(zip(m.indices[lo:hi].tolist(), m.data[lo:hi].tolist()))

    def row_sums(self) -> np.ndarray:
        return np.asarray(self.matrix.sum(axis=1)).ravel()[self.tri.interior_vertices]

    def to_triples(self) -> list:
        m = self.matrix.tocoo()
        order = np.lexsort((m.col, m.row))
        return [[int(m.row[k]), int(m.col[k]), float(m.data[k])] for k in order]

    def lerp(self, other: "WeightMatrix", t: float) -> "WeightMatrix":
        """Straight-line interpolation ``(1 - t) self + t other``."""
        if other.tri is not self.tri and other.tri.to_dict() != self.tri.to_dict():
            raise ValueError("weights belong to different triangulations")
        m = (1.0 - t) * self.matrix + t * other.matrix
        return WeightMatrix(self.tri, sparse.csr_matrix(m))

    def is_permissible(self, tol: float = 1e-12) -> bool:
        tri = self.tri
        m = self.matrix.tocsr()
        inner = set(tri.interior_vertices.tolist())
        for i in range(tri.vertex_count):
            row = self.row(i)
            if i not in inner:
                if row:
                    return False
                continue
            if set(row) != set(tri.neighbors[i]):
                return False
            if min(row.values()) <= 0:
                return False
        return bool(np.all(np.abs(self.row_sums() - 1.0) <= tol)) and m.shape == (tri.vertex_count,) * 2


def _assemble(tri, triples) -> sparse.csr_matrix:
    t = np.asarray(triples, dtype=float).reshape(-1, 3)
    n = tri.vertex_count
    return sparse.csr_matrix((t[:, 2], (t[:, 0].astype(int), t[:, 1].astype(int))), shape=(n, n))


def normalize(tri: DiskTriangulation, raw) -> WeightMatrix:
    """Normalize raw positive weights ``c_ij`` so each interior row sums to one.

    ``raw`` is a mapping ``{(i, j): c_ij}``, a sequence of ``(i, j, c_ij)``
    triples, or a ``(V, V)`` sparse matrix. Every neighbor of every interior
    vertex needs a strictly positive entry; rows of boundary vertices are
    ignored.
    """
    if isinstance(raw, dict):
        raw = [(i, j, c) for (i, j), c in raw.items()]
    m = raw.tocsr() if sparse.issparse(raw) else _assemble(tri, raw)
    rows, cols, vals = [], [], []
    for i in tri.interior_vertices.tolist():
        lo, hi = m.indptr[i], m.indptr[i + 1]
        got = dict(zip(m.indices[lo:hi].tolist(), m.data[lo:hi].tolist()))
        nb = tri.neighbors[i]
        c = np.array([got.get(j, 0.0) for j in nb])
        if np.any(~(c > 0)) or not np.all(np.isfinite(c)):
            bad = [j for j, x in zip(nb, c) if not x > 0]
            raise NonPositiveWeight(f"vertex {i}: non-positive weight toward {bad}")
        extra = set(got) - set(nb) - {i}
        if extra:
            raise ValueError(f"vertex {i}: weights on non-neighbors {sorted(extra)}")
        rows.extend([i] * len(nb))
        cols.extend(nb)
        vals.extend((c / c.sum()).tolist())
    n = tri.vertex_count
    return WeightMatrix(tri, sparse.csr_matrix((vals, (rows, cols)), shape=(n, n)))


def uniform_weights(tri: DiskTriangulation) -> WeightMatrix:
    return normalize(tri, [(i, j, 1.0) for i in tri.interior_vertices.tolist()
                           for j in tri.neighbors[i]])


def random_weights(tri: DiskTriangulation, rng=None, spread: float = 1.0) -> WeightMatrix:
    """Log-uniform random raw weights in ``[e^-spread, e^spread]``, normalized."""
    rng = np.random.default_rng(rng)
    trip = [(i, j, float(np.exp(rng.uniform(-spread, spread))))
            for i in tri.interior_vertices.tolist() for j in tri.neighbors[i]]
    return normalize(tri, trip)


@dataclass
class TutteSystem:
    """``(I - W_II) x_I = W_IB x_B`` for both coordinates."""

    interior: np.ndarray
    matrix: sparse.csc_matrix
    rhs: np.ndarray


def tutte_system(tri, boundary: BoundaryFixing, w: WeightMatrix) -> TutteSystem:
    inner = tri.interior_vertices
    bnd = np.asarray(boundary.ids)
    m = w.matrix.tocsr()
    w_ii = m[inner][:, inner]
    w_ib = m[inner][:, bnd]
    a = (sparse.identity(len(inner), format="csc") - w_ii).tocsc()
    return TutteSystem(inner, a, np.asarray(w_ib @ boundary.positions))


def _solve_direct(sys_, target):
    lu = splu(sys_.matrix)
    x = lu.solve(sys_.rhs)
    for _ in range(6):
        r = sys_.rhs - sys_.matrix @ x
        if np.abs(r).max(initial=0.0) <= target:
            break
        x = x + lu.solve(r)
    return x


def _solve_iterative(sys_, target, omega=0.9, max_iter=500_000):
    # damped Jacobi on x = W_II x + b; the diagonal of I - W_II is one
    off = sparse.identity(sys_.matrix.shape[0], format="csr") - sys_.matrix.tocsr()
    b = sys_.rhs
    x = np.zeros_like(b)
    for it in range(max_iter):
        x = (1 - omega) * x + omega * (off @ x + b)
        if it % 25 == 0:
            r = b - sys_.matrix @ x
            if np.abs(r).max(initial=0.0) <= target:
                break
    return x


def tutte_solve(tri: DiskTriangulation, boundary: BoundaryFixing, w: WeightMatrix,
                method: str = "direct", tol: float = 1e-10) -> GeodesicEmbedding:
    """Place interior vertices at the weighted averages of their neighbors.

    The residual of the linear system is driven below ``tol`` times the
    boundary diameter. If the boundary is not strictly convex a
    :class:`NonConvexBoundary` warning is issued and the result carries no
    embedding guarantee.
    """
    if tuple(boundary.ids) != tuple(tri.boundary):
        raise ValueError("boundary fixing does not follow the boundary cycle")
    if not boundary.strictly_convex:
        warnings.warn("boundary is not strictly convex; embedding not guaranteed",
                      NonConvexBoundary, stacklevel=2)
    pos = np.zeros((tri.vertex_count, 2))
    pos[list(boundary.ids)] = boundary.positions
    if tri.n_interior:
        sys_ = tutte_system(tri, boundary, w)
        target = tol * boundary.diameter
        if method == "direct":
            x = _solve_direct(sys_, target)
        elif method == "iterative":
            x = _solve_iterative(sys_, target * 1e-2)
        else:
            raise ValueError(f"unknown method {method!r}")
        if not np.all(np.isfinite(x)):
            raise SingularSystem("Tutte system solve produced non-finite values")
        pos[sys_.interior] = x
    return GeodesicEmbedding(tri, pos, boundary)


def tutte_residual(emb: GeodesicEmbedding, w: WeightMatrix) -> float:
    """Max-norm of ``sum_j w_ij p_j - p_i`` over interior vertices."""
    inner = emb.tri.interior_vertices
    if not len(inner):
        return 0.0
    r = (w.matrix @ emb.positions)[inner] - emb.positions[inner]
    return float(np.abs(r).max())


class TutteMap:
    """Weights -> embedding with triangulation and boundary held fixed."""

    def __init__(self, tri: DiskTriangulation, boundary: BoundaryFixing, method: str = "direct"):
        self.tri = tri
        self.boundary = boundary
        self.method = method

    def __call__(self, w: WeightMatrix) -> GeodesicEmbedding:
        return tutte_solve(self.tri, self.boundary, w, method=self.method)


def tutte_map(w: WeightMatrix, boundary: BoundaryFixing) -> GeodesicEmbedding:
    return tutte_solve(w.tri, boundary, w)
