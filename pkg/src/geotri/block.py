"""The 13-vertex building block polygon and its sliding vertex.

Vertex ids (boundary first, counterclockwise)::

    A=0 B=1 C=2 D=3 G=4 D'=5 C'=6 B'=7 A'=8 K=9 | P=10 L=11 R=12

``P`` slides along the wedge ``K A`` (or ``K A'``); ``R`` and ``L`` sit in
the sectors at ``C`` and ``C'``. Whether ``P`` can reach abscissa ``t`` is
governed by the y-intercept of the segment ``L R``, which has to stay below
the notch vertex ``G``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum

import mpmath
import numpy as np
import sympy
from scipy.optimize import bisect

from .geometry import (BoundaryFixing, GeodesicEmbedding, polygon_is_simple,
                       verify_embedding)
from .homotopy import EmbeddingPath
from .mesh import DiskTriangulation

log = logging.getLogger(__name__)

A, B, C, D, G, Dp, Cp, Bp, Ap, K, P, L, R = range(13)
NAMES = ("A", "B", "C", "D", "G", "D'", "C'", "B'", "A'", "K", "P", "L", "R")

FACES = np.array([
    (P, K, A), (P, A, B), (P, B, R), (P, R, L), (P, L, Bp), (P, Bp, Ap), (P, Ap, K),
    (R, B, C), (R, C, D), (R, D, G), (R, G, L),
    (L, G, Dp), (L, Dp, Cp), (L, Cp, Bp),
])

BLOCK_TRI = DiskTriangulation(13, tuple(range(10)), FACES)

T0 = 3.0 - 2.0 * math.sqrt(2.0)
C_DERIVED = 4.0 * math.sqrt(2.0) - 5.0
C_PRINTED = (2.0 + math.sqrt(2.0)) / (3.0 + math.sqrt(2.0))


class InvalidParams(ValueError):
    pass


class ClearanceFailure(RuntimeError):
    pass


@dataclass(frozen=True)
class BlockParams:
    """Shape parameters of the block.

    ``eps`` moves ``K`` up, ``delta`` moves ``G`` up; ``k`` is the wedge
    depth (``K = (0, -k)``) and ``c`` the abscissa of the ``C``/``D``
    notch walls.
    """

    k: float = 0.5
    eps: float = 0.0
    delta: float = 0.0
    c: float = C_DERIVED

    def __post_init__(self):
        if not self.k > 0:
            raise InvalidParams("k must be positive")
        if not T0 < float(self.c) < 1.0:
            raise InvalidParams(f"c={self.c} outside ({T0}, 1)")
        if not polygon_is_simple(boundary_positions(self)):
            raise InvalidParams("perturbed boundary is not a simple polygon")

    @property
    def k_eff(self):
        # moving K up by eps makes the wedge shallower
        return self.k - self.eps

    @property
    def g_height(self):
        if isinstance(self.delta, sympy.Basic):
            return sympy.Rational(1, 2) + self.delta
        return 0.5 + self.delta

    def to_dict(self) -> dict:
        return {"k": float(self.k), "eps": float(self.eps), "delta": float(self.delta),
                "c": float(self.c)}


def boundary_positions(params: BlockParams) -> np.ndarray:
    c = float(params.c)
    up = [(1.0, 0.0), (1.0, 1.0), (c, 1.0), (c, (c + 1.0) / 2.0)]
    mirror = [(-x, y) for x, y in reversed(up)]
    return np.array(up + [(0.0, 0.5 + float(params.delta))] + mirror
                    + [(0.0, -float(params.k) + float(params.eps))])


# ---------------------------------------------------------------------------
# the intercept function

def h(t, k=0.5, c=C_DERIVED):
    """y-intercept of ``LR`` when ``P`` sits on ``KA`` at abscissa ``t``."""
    return 1 + (c - 1) * (1 + k - k * t) / (1 - t * t)


def h_expanded(t, k=0.5, c=C_DERIVED):
    """The same function written as a polynomial part plus a constant."""
    return (c - 1) * (t * t * (k + 1) - k * t) / (1 - t * t) + 1 + (k + 1) * (c - 1)


def dh_dk(t, c=C_DERIVED):
    # h is affine in k
    return (c - 1) / (1 + t)


@dataclass(frozen=True)
class HMax:
    t_star: float
    value: float


def h_max(k=0.5, c=C_DERIVED) -> HMax:
    """Closed-form maximizer and maximum of ``h(., k)`` on ``[0, c]``."""
    s = math.sqrt(1 + 2 * k)
    return HMax((1 + k - s) / k, 1 + (c - 1) * (1 + k + s) / 2)


def golden_section_max(f, a, b, tol=1e-13, dps=50, max_iter=500):
    """Maximize a unimodal ``f`` on ``[a, b]`` by golden-section search.

    Runs in ``mpmath`` at ``dps`` digits: near a quadratic maximum ``f`` is
    flat to ``(dt)^2``, so double precision cannot resolve the abscissa
    better than about ``1e-8``. Returns ``(t, f(t))`` as floats.
    """
    with mpmath.workdps(dps):
        a, b = mpmath.mpf(a), mpmath.mpf(b)
        invphi = (mpmath.sqrt(5) - 1) / 2
        x1, x2 = b - invphi * (b - a), a + invphi * (b - a)
        f1, f2 = f(x1), f(x2)
        for _ in range(max_iter):
            if b - a <= tol:
                break
            if f1 < f2:
                a, x1, f1 = x1, x2, f2
                x2 = a + invphi * (b - a)
                f2 = f(x2)
            else:
                b, x2, f2 = x2, x1, f1
                x1 = b - invphi * (b - a)
                f1 = f(x1)
        t = (a + b) / 2
        return float(t), float(f(t))


def solve_c(k=0.5, target=0.5) -> float:
    """The notch abscissa ``c`` for which the maximum of ``h(., k)`` is ``target``.

    Found by bisection (the maximum is increasing in ``c``). The printed
    constant ``(2 + sqrt 2) / (3 + sqrt 2)`` does not satisfy the identity;
    the mismatch is logged.
    """
    t_star = h_max(k, 0.5).t_star
    c = bisect(lambda c: h_max(k, c).value - target, t_star + 1e-15, 1 - 1e-15,
               xtol=1e-16, rtol=4 * np.finfo(float).eps, maxiter=200)
    printed = h_max(k, C_PRINTED).value
    if abs(printed - target) > 1e-9:
        log.warning("printed c = (2+sqrt2)/(3+sqrt2) = %.12f gives max h = %.6f != %g; "
                    "using c = %.15f (closed form 4*sqrt2 - 5 = %.15f)",
                    C_PRINTED, printed, target, c, C_DERIVED)
    return c


def c_discrepancy(k=0.5) -> dict:
    return {"c_printed": C_PRINTED, "h_max_printed": h_max(k, C_PRINTED).value,
            "h0_printed": h(0.0, k, C_PRINTED), "c_derived": C_DERIVED,
            "h_max_derived": h_max(k, C_DERIVED).value}


# ---------------------------------------------------------------------------
# perturbations and feasibility

class Perturbation(str, Enum):
    ADMISSIBLE = "admissible"
    FORBIDDEN = "forbidden"
    UNCLASSIFIED = "unclassified"


def classify_perturbation(eps, delta) -> Perturbation:
    """Classify a vertical displacement ``eps`` of ``K`` and ``delta`` of ``G``.

    Implements the four admissible and two forbidden cases as stated; pairs
    in neither list are ``UNCLASSIFIED``. Exact feasibility questions should
    go through :func:`feasible_t`.
    """
    if ((eps < 0 and delta >= 0) or (delta > 0 and eps <= 0)
            or (eps > 0 and delta >= 3 * eps) or (delta < 0 and eps <= 3 * delta)):
        return Perturbation.ADMISSIBLE
    if (eps == 0 and delta < 0) or (delta == 0 and eps > 0):
        return Perturbation.FORBIDDEN
    return Perturbation.UNCLASSIFIED


def lowest_intercept(t, k, c):
    """Infimum over embeddings with ``P`` at abscissa ``t >= 0`` of the intercept of ``LR``.

    For ``t <= c`` it is ``h(t, k)``. Past the notch wall the infimum is
    reached with ``R`` collapsing onto ``PL`` and ``L`` on ``PB'`` at
    ``x = -c``.
    """
    if t <= c:
        return h(t, k, c)
    py = k * (t - 1)
    yl = py + (1 - py) * (t + c) / (1 + t)  # PB' at x = -c
    return yl + (py - yl) * c / (t + c)


def feasibility_margin(params: BlockParams, t):
    """``y_G - inf H``: positive iff ``P`` can reach abscissa ``t``."""
    at = abs(t) if not isinstance(t, sympy.Basic) else sympy.Abs(t)
    return params.g_height - lowest_intercept(at, params.k_eff, params.c)


def feasible_t(params: BlockParams, t, tol: float = 1e-12) -> bool:
    """Whether some geodesic triangulation of the block puts ``P`` at abscissa ``t``.

    Float input: feasible iff the margin exceeds ``tol`` (the orientation
    threshold used by :func:`verify_embedding`; configurations with less
    clearance cannot be certified). Sympy input (with sympy ``c``, ``k``):
    decided exactly.
    """
    if isinstance(t, sympy.Basic) or isinstance(params.c, sympy.Basic):
        if not -1 < t < 1:
            raise ValueError("|t| < 1 required")
        m = sympy.nsimplify(sympy.simplify(feasibility_margin(params, t)))
        return bool(sympy.simplify(m) > 0)
    if not -1 < t < 1:
        raise ValueError("|t| < 1 required")
    return bool(feasibility_margin(params, float(t)) > tol)


def exact_params(eps=0, delta=0) -> BlockParams:
    """Block parameters with sympy-exact ``k = 1/2`` and ``c = 4 sqrt 2 - 5``."""
    return BlockParams(sympy.Rational(1, 2), sympy.nsimplify(eps), sympy.nsimplify(delta),
                       4 * sympy.sqrt(2) - 5)


# ---------------------------------------------------------------------------
# geometry helpers

def _line_at_x(p, q, x):
    """Ordinate of line ``pq`` at abscissa ``x``."""
    return p[1] + (q[1] - p[1]) * (x - p[0]) / (q[0] - p[0])


def _unit(v):
    return v / np.hypot(v[0], v[1])


def slide_state(params: BlockParams, t: float, mu: float = 0.0, nu: float = 0.0) -> np.ndarray:
    """Positions of ``P, L, R`` for slide parameter ``t``.

    ``P`` is lifted by ``mu`` above the wedge; ``R`` starts on ``PB`` at
    ``x = c`` and moves ``nu`` into the sector along the bisector of the
    directions to ``B`` and ``C`` (mirrored for ``L``).
    """
    c = float(params.c)
    k = float(params.k_eff)
    bnd = boundary_positions(params)
    p = np.array([t, k * (abs(t) - 1) + mu])
    r0 = np.array([c, _line_at_x(p, bnd[B], c)])
    l0 = np.array([-c, _line_at_x(p, bnd[Bp], -c)])
    r = r0 + nu * _unit(_unit(bnd[B] - r0) + _unit(bnd[C] - r0))
    l_ = l0 + nu * _unit(_unit(bnd[Bp] - l0) + _unit(bnd[Cp] - l0))
    return np.array([p, l_, r])


def block_positions(params: BlockParams, t, mu=0.0, nu=0.0) -> np.ndarray:
    return np.vstack([boundary_positions(params), slide_state(params, t, mu, nu)])


@dataclass(frozen=True)
class Block:
    params: BlockParams
    tri: DiskTriangulation
    boundary: BoundaryFixing
    reference: GeodesicEmbedding = field(repr=False)


def build_block(params: BlockParams | None = None) -> Block:
    """Triangulation, boundary fixing and reference embedding (``P`` at ``-c``)."""
    params = BlockParams() if params is None else params
    fix = BoundaryFixing(BLOCK_TRI.boundary, boundary_positions(params))
    ref = gamma(params, -float(params.c))
    return Block(params, BLOCK_TRI, fix, ref)


def embedding(params: BlockParams, positions) -> GeodesicEmbedding:
    fix = BoundaryFixing(BLOCK_TRI.boundary, boundary_positions(params))
    return GeodesicEmbedding(BLOCK_TRI, positions, fix)


# ---------------------------------------------------------------------------
# the path gamma

def gamma_clearance(params: BlockParams, ts) -> float:
    """Clearance ``mu = nu = eta / 8`` with ``eta`` the least margin over ``ts``."""
    eta = min(feasibility_margin(params, float(t)) for t in np.atleast_1d(ts))
    if not eta > 0:
        raise ClearanceFailure(f"no clearance on the requested range (margin {eta:.3g})")
    return eta / 8.0


def gamma(params: BlockParams, t: float, clearance: float | None = None) -> GeodesicEmbedding:
    """Embedding with ``P`` at abscissa exactly ``t``, for ``t`` in ``[-c, c]``.

    ``clearance`` is the lift of ``P`` and the offset of ``R``/``L``; pass the
    same value for every sample of a path to keep it continuous. By default
    it is derived from the margin at ``t`` alone.
    """
    c = float(params.c)
    if not -c <= t <= c:
        raise ValueError(f"t={t} outside [-c, c]")
    if clearance is None:
        clearance = gamma_clearance(params, [t])
    return embedding(params, block_positions(params, t, clearance, clearance))


def gamma_path(params: BlockParams, ts, clearance: float | None = None,
               halvings: int = 6) -> EmbeddingPath:
    """``gamma`` sampled at ``ts`` with a common, self-validated clearance.

    Raises
    ------
    ClearanceFailure
        If no clearance among ``eta/8, eta/16, ...`` verifies every sample.
    """
    ts = np.asarray(ts, dtype=float)
    kappa = gamma_clearance(params, ts) if clearance is None else clearance
    for _ in range(halvings + 1):
        frames = [gamma(params, float(t), kappa) for t in ts]
        if all(verify_embedding(f).passed for f in frames):
            return EmbeddingPath(ts, frames, "gamma", {"clearance": kappa, **params.to_dict()})
        kappa /= 2
    raise ClearanceFailure("gamma samples did not verify after halving the clearance")


# ---------------------------------------------------------------------------
# brute-force oracle

def _clip(poly, a, b):
    """Clip a convex polygon to the half-plane ``a . x > b`` (Sutherland-Hodgman)."""
    out = []
    n = len(poly)
    for i in range(n):
        p, q = poly[i], poly[(i + 1) % n]
        fp, fq = a @ p - b, a @ q - b
        if fp > 0:
            out.append(p)
        if (fp > 0) != (fq > 0):
            out.append(p + (q - p) * (fp / (fp - fq)))
    return out


def _halfplane(u, v):
    # points x with orient(u, v, x) > 0, as a . x > b
    a = np.array([-(v[1] - u[1]), v[0] - u[0]])
    return a, a @ u


def _cheb(lo, hi, n):
    # nodes clustered at both ends so thin corners are resolved
    x = np.cos(np.pi * (np.arange(n) + 0.5) / n)[::-1]
    return lo + (hi - lo) * (x + 1) / 2


def _orient(u, v, w):
    return ((v[..., 0] - u[..., 0]) * (w[..., 1] - u[..., 1])
            - (v[..., 1] - u[..., 1]) * (w[..., 0] - u[..., 0]))


@dataclass
class OracleResult:
    found: bool
    witness: GeodesicEmbedding | None = None
    tried_p: int = 0
    feasible_r: int = 0
    feasible_l: int = 0

    def __bool__(self):
        return self.found


def _region_grid(constraints, box, resolution, eps):
    poly = [np.array(p, dtype=float) for p in box]
    for u, v in constraints:
        a, b = _halfplane(u, v)
        poly = _clip(poly, a, b)
        if len(poly) < 3:
            return None
    poly = np.array(poly)
    lo, hi = poly.min(axis=0), poly.max(axis=0)
    xs, ys = _cheb(lo[0], hi[0], resolution), _cheb(lo[1], hi[1], resolution)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    pts = np.stack([X, Y], axis=-1)
    ok = np.ones(X.shape, dtype=bool)
    for u, v in constraints:
        ok &= _orient(np.asarray(u), np.asarray(v), pts) > eps
    return xs, ys, ok


def feasibility_oracle(params: BlockParams, t: float, resolution: int = 400,
                       p_offsets=None, eps: float = 1e-12) -> OracleResult:
    """Search a grid of ``(P, L, R)`` placements for an embedding with ``P`` at ``x = t``.

    ``P`` is tried at a geometric sequence of heights above its lower
    constraint; for each, ``R`` and ``L`` range over ``resolution`` x
    ``resolution`` grids covering the regions allowed by their faces with
    boundary vertices and ``P``. The two faces involving both ``L`` and
    ``R`` are linear in ``L``, so each ``(R, column of L)`` pair is decided
    by intersecting intervals. A hit is confirmed with a paranoid
    :func:`verify_embedding` before being returned. Not finding a witness
    is evidence, not proof, of infeasibility.
    """
    bnd = boundary_positions(params)
    if p_offsets is None:
        p_offsets = np.geomspace(1e-9, 0.5, 28)
    # lower limit for P is the wedge on the side of t
    base = _line_at_x(bnd[K], bnd[A] if t >= 0 else bnd[Ap], t)
    box = [(-1, -1), (1, -1), (1, 1), (-1, 1)]
    res = OracleResult(False)
    for off in p_offsets:
        p = np.array([t, base + off])
        own = [(bnd[K], bnd[A]), (bnd[A], bnd[B]), (bnd[Bp], bnd[Ap]), (bnd[Ap], bnd[K])]
        if any(_orient(u, v, p) <= eps for u, v in own):
            continue
        res.tried_p += 1
        rg = _region_grid([(p, bnd[B]), (bnd[B], bnd[C]), (bnd[C], bnd[D]), (bnd[D], bnd[G])],
                          box, resolution, eps)
        lg = _region_grid([(bnd[Bp], p), (bnd[G], bnd[Dp]), (bnd[Dp], bnd[Cp]),
                           (bnd[Cp], bnd[Bp])], box, resolution, eps)
        if rg is None or lg is None:
            continue
        rx, ry, rok = rg
        lx, ly, lok = lg
        res.feasible_r += int(rok.sum())
        res.feasible_l += int(lok.sum())
        cols = np.flatnonzero(lok.any(axis=1))
        if not len(cols) or not rok.any():
            continue
        # contiguous feasible range of L in each column
        lo_idx = np.array([np.flatnonzero(lok[j])[0] for j in cols])
        hi_idx = np.array([np.flatnonzero(lok[j])[-1] for j in cols])
        xl = lx[cols]
        ri, rj = np.nonzero(rok)
        rpts = np.column_stack([rx[ri], ry[rj]])
        g = bnd[G]
        for s in range(0, len(rpts), 2048):
            rr = rpts[s:s + 2048, None, :]
            # orient(R, G, L) > 0 and orient(P, R, L) > 0, each a*y_L + b > 0
            a1 = (g[0] - rr[..., 0])
            b1 = -(g[1] - rr[..., 1]) * (xl - rr[..., 0]) - a1 * rr[..., 1]
            a2 = (rr[..., 0] - p[0])
            b2 = -(rr[..., 1] - p[1]) * (xl - p[0]) - a2 * p[1]
            ylo = np.full(a1.shape, -np.inf)
            yhi = np.full(a1.shape, np.inf)
            for a_, b_ in ((a1, b1), (a2, b2)):
                with np.errstate(divide="ignore", invalid="ignore"):
                    root = (eps - b_) / a_
                ylo = np.where(a_ > 0, np.maximum(ylo, root), ylo)
                yhi = np.where(a_ < 0, np.minimum(yhi, root), yhi)
                dead = (a_ == 0) & (b_ <= eps)
                ylo = np.where(dead, np.inf, ylo)
            # first grid row in the column at or above ylo, clipped to the feasible range
            k_lo = np.maximum(np.searchsorted(ly, ylo, side="right"), lo_idx)
            k_hi = np.minimum(np.searchsorted(ly, yhi, side="left") - 1, hi_idx)
            hit = np.argwhere(k_lo <= k_hi)
            for hr, hc in hit[:16]:
                lpt = np.array([xl[hc], ly[k_lo[hr, hc]]])
                rpt = rpts[s + hr]
                pos = np.vstack([bnd, p, lpt, rpt])
                emb = embedding(params, pos)
                if verify_embedding(emb, paranoid=True).passed:
                    res.found, res.witness = True, emb
                    return res
    return res
