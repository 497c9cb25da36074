"""Stacks of shrinking block copies and their configuration spaces.

Copy ``i`` (1-based) is the block under ``g_i(x, y) = a_i (x, y) + (0, b_i)``
with ``a_i = rho^(i-1)`` and ``b_{i+1} = b_i + a_i/2 + a_{i+1}/2``, so the
wedge vertex ``K`` of copy ``i+1`` is the notch vertex ``G`` of copy ``i``.
Junction ``i`` (between copies ``i`` and ``i+1``) is that shared vertex; it
is interior and may move vertically by a world displacement ``s_i``. Copy
``i`` then sees ``eps_i = s_{i-1} / a_i`` and ``delta_i = s_i / a_i``, with
``s_0 = s_{n+1} = 0`` because the bottom ``K`` and top ``G`` are on the
boundary.

The wedge of copy ``i+1`` has exactly the notch angle of copy ``i``, so
``A_{i+1}`` lands on the segment ``G_i D_i``. The notch faces ``R D G`` and
``L G D'`` of copy ``i`` are therefore split at ``A_{i+1}`` and ``A'_{i+1}``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
import sympy

from . import block as blk
from .block import (BlockParams, ClearanceFailure, T0, feasibility_margin, feasible_t, h,
                    slide_state)
from .geometry import (ORIENT_EPS, BoundaryFixing, GeodesicEmbedding, face_determinants,
                       verify_embedding)
from .homotopy import EmbeddingPath
from .mesh import DiskTriangulation, validate_combinatorics


class RatioTooLarge(ValueError):
    pass


class NotStrictSubset(ValueError):
    pass


class PointOnCurve(ValueError):
    pass


LOCAL_BOUNDARY = ("A", "B", "C", "D")


@dataclass(frozen=True)
class StackSpec:
    n: int
    rho: float = 0.25
    c: float = blk.C_DERIVED
    k: float = 0.5

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n >= 1 required")
        if not 0 < self.rho < 1:
            raise ValueError("0 < rho < 1 required")

    @property
    def copies(self) -> int:
        return self.n + 1

    @property
    def a(self) -> np.ndarray:
        return self.rho ** np.arange(self.copies)

    @property
    def b(self) -> np.ndarray:
        a = self.a
        b = np.zeros(self.copies)
        for i in range(1, self.copies):
            b[i] = b[i - 1] + a[i - 1] / 2 + a[i] / 2
        return b

    def g(self, i: int, pts) -> np.ndarray:
        """Similarity of copy ``i`` (1-based) applied to local points."""
        pts = np.asarray(pts, dtype=float)
        return self.a[i - 1] * pts + np.array([0.0, self.b[i - 1]])

    def to_dict(self) -> dict:
        return {"n": self.n, "rho": self.rho, "c": self.c, "k": self.k,
                "a": self.a.tolist(), "b": self.b.tolist()}


@dataclass(frozen=True, eq=False)
class StackComplex:
    """Triangulation of the stack with vertex bookkeeping.

    ``index[(i, name)]`` is the global id of local vertex ``name`` of copy
    ``i``; ``K`` of copy ``i+1`` and ``G`` of copy ``i`` share an id.
    """

    spec: StackSpec
    tri: DiskTriangulation
    index: dict = field(repr=False)
    boundary: BoundaryFixing = field(repr=False)

    def vid(self, i, name) -> int:
        return self.index[(i, name)]

    @property
    def junctions(self) -> list:
        return [self.vid(i, "G") for i in range(1, self.spec.n + 1)]


@dataclass(frozen=True, eq=False)
class StackConfiguration:
    """A geodesic triangulation of the stack built from slide values and junction heights."""

    complex: StackComplex
    embedding: GeodesicEmbedding
    y: np.ndarray
    s: np.ndarray
    clearance: float

    @property
    def positions(self) -> np.ndarray:
        return self.embedding.positions

    def verify(self, paranoid=False):
        return verify_embedding(self.embedding, paranoid=paranoid)

    def copy_params(self, i) -> BlockParams:
        return copy_params(self.complex.spec, self.s, i)


def _split_faces(i, n):
    faces = []
    for f in blk.FACES.tolist():
        tri = tuple(blk.NAMES[v] for v in f)
        if i <= n and tri == ("R", "D", "G"):
            faces += [("R", "D", (i + 1, "A")), ("R", (i + 1, "A"), "G")]
        elif i <= n and tri == ("L", "G", "D'"):
            faces += [("L", "G", (i + 1, "A'")), ("L", (i + 1, "A'"), "D'")]
        else:
            faces.append(tri)
    return faces


def _build_complex(spec: StackSpec) -> StackComplex:
    n, m = spec.n, spec.copies
    index = {}
    nxt = 0
    # boundary cycle first, in order
    order = [(1, "K")] + [(1, x) for x in LOCAL_BOUNDARY]
    for i in range(2, m + 1):
        order += [(i, x) for x in LOCAL_BOUNDARY]
    order.append((m, "G"))
    for i in range(m, 1, -1):
        order += [(i, x) for x in ("D'", "C'", "B'", "A'")]
    order += [(1, x) for x in ("D'", "C'", "B'", "A'")]
    for key in order:
        index[key] = nxt
        nxt += 1
    for i in range(1, m + 1):
        for name in ("P", "L", "R") + (("G",) if i <= n else ()):
            index[(i, name)] = nxt
            nxt += 1
    for i in range(2, m + 1):
        index[(i, "K")] = index[(i - 1, "G")]

    faces = []
    for i in range(1, m + 1):
        for f in _split_faces(i, n):
            faces.append([index[v if isinstance(v, tuple) else (i, v)] for v in f])
    tri = DiskTriangulation(nxt, tuple(range(len(order))), faces)

    local = blk.boundary_positions(BlockParams(k=spec.k, c=spec.c))
    pos = np.zeros((nxt, 2))
    for i in range(1, m + 1):
        world = spec.g(i, local)
        for lid, name in enumerate(blk.NAMES[:10]):
            if (i, name) in index:
                pos[index[(i, name)]] = world[lid]
    # junction identity: K of the next copy is exactly G of this one
    for i in range(1, n + 1):
        gk = spec.g(i + 1, local[blk.K])
        if not np.array_equal(gk, spec.g(i, local[blk.G])):
            raise RatioTooLarge("junction vertices do not coincide exactly")
    bfix = BoundaryFixing(tri.boundary, pos[list(tri.boundary)])
    return StackComplex(spec, tri, index, bfix)


def copy_params(spec: StackSpec, s, i) -> BlockParams:
    """Effective block parameters of copy ``i`` for junction displacements ``s``."""
    s = np.asarray(s, dtype=float)
    full = np.concatenate([[0.0], s, [0.0]])
    a = spec.a[i - 1]
    return BlockParams(k=spec.k, eps=full[i - 1] / a, delta=full[i] / a, c=spec.c)


def _gap_ok(cx: StackComplex) -> bool:
    p = np.zeros((cx.tri.vertex_count, 2))
    p[list(cx.tri.boundary)] = cx.boundary.positions
    spec = cx.spec
    for i in range(1, spec.n + 1):
        g = spec.g(i, [0.0, 0.5])
        d = p[cx.vid(i, "D")]
        a = p[cx.vid(i + 1, "A")]
        # A_{i+1} strictly inside segment G_i D_i
        lam = (a - g) @ (d - g) / ((d - g) @ (d - g))
        if not 0 < lam < 1:
            return False
    return True


# ---------------------------------------------------------------------------
# displacement schemes

def chains(J) -> list:
    """Maximal runs of consecutive integers in ``J``."""
    out = []
    for j in sorted(set(J)):
        if out and j == out[-1][-1] + 1:
            out[-1].append(j)
        else:
            out.append([j])
    return out


def freeing_perturbation(spec: StackSpec, J, eps: float | None = None,
                         decay: float = 4.0) -> np.ndarray:
    """Junction displacements that free every copy in ``J`` to slide past ``t0``.

    For a chain ``i..i+m`` of ``J`` with ``i != 1`` the junction below copy
    ``j`` (its ``K``) moves down by ``eps / decay^(j-i)``; for a chain
    ``1..m`` the junction above copy ``j`` (its ``G``) moves up by
    ``eps / decay^(m-j)``. Displacements are in world units. Returns the
    vector ``s`` of length ``n``.

    Raises
    ------
    NotStrictSubset
        If ``J`` is not a proper subset of ``{1, ..., n+1}``.
    """
    J = set(int(j) for j in J)
    full = set(range(1, spec.copies + 1))
    if not J <= full or J == full:
        raise NotStrictSubset(f"J={sorted(J)} is not a strict subset of {sorted(full)}")
    if eps is None:
        eps = default_eps(spec)
    s = np.zeros(spec.n)
    for ch in chains(J):
        if ch[0] == 1:
            m = ch[-1]
            for j in ch:
                s[j - 1] = eps / decay ** (m - j)  # G_j up
        else:
            i = ch[0]
            for j in ch:
                s[j - 2] = -eps / decay ** (j - i)  # K_j = G_{j-1} down
    return s


# older name of the same scheme
lemma43_perturbation = freeing_perturbation


def default_eps(spec: StackSpec) -> float:
    # 2% of the smallest copy keeps every effective perturbation small
    return 0.02 * spec.a[-1]


def strict_subsets(m: int):
    full = range(1, m + 1)
    for r in range(m):
        for J in itertools.combinations(full, r):
            yield frozenset(J)


def band_width(spec: StackSpec) -> float:
    """Width of the band ``c - theta <= |y| <= c`` where a copy counts as pinned."""
    return (spec.c - T0) / 2


def displacement_field(spec: StackSpec, y, eps=None, decay=4.0) -> np.ndarray:
    """Junction displacements as a continuous function of the slide vector ``y``.

    Each copy gets a pinning weight ``w_j`` that is 1 at ``|y_j| = c`` and 0
    once ``|y_j| <= c - theta``. The field blends the schemes of all proper
    subsets ``J`` multilinearly with weight ``prod_{J} (1 - w_j) prod_{not J} w_j``.
    Where some copy is pinned the weights sum to one, so every copy that is
    free gets a convex combination of schemes that free it.
    """
    y = np.asarray(y, dtype=float)
    th = band_width(spec)
    w = np.clip((np.abs(y) - (spec.c - th)) / th, 0.0, 1.0)
    f = 1.0 - w
    s = np.zeros(spec.n)
    for J in strict_subsets(spec.copies):
        if not J:
            continue
        wt = 1.0
        for j in range(1, spec.copies + 1):
            wt *= f[j - 1] if j in J else w[j - 1]
        if wt:
            s += wt * freeing_perturbation(spec, J, eps, decay)
    return s


def _min_margin(params: BlockParams, ranges) -> float:
    best = math.inf
    t_star = blk.h_max(float(params.k_eff), params.c).t_star
    for lo, hi in ranges:
        ts = np.concatenate([np.linspace(lo, hi, 2001), [lo, hi]])
        for cand in (t_star, -t_star, T0, -T0):
            if lo <= cand <= hi:
                ts = np.append(ts, cand)
        best = min(best, min(feasibility_margin(params, float(t)) for t in ts))
    return best


def stack_clearance(spec: StackSpec, eps=None, decay=4.0) -> float:
    """One clearance for all copies, in copy units: an eighth of the worst margin.

    The worst case is taken over every proper subset scheme and every copy:
    free copies over ``[-c, c]``, the others over the pinned band. Margins
    are affine in the perturbation for fixed ``t``, so the bound also covers
    the blended field.
    """
    c = spec.c
    th = band_width(spec)
    band = [(-c, -(c - th)), (c - th, c)]
    worst = math.inf
    for J in strict_subsets(spec.copies):
        s = freeing_perturbation(spec, J, eps, decay) if J else np.zeros(spec.n)
        for i in range(1, spec.copies + 1):
            ranges = [(-c, c)] if i in J else band
            worst = min(worst, _min_margin(copy_params(spec, s, i), ranges))
    if not worst > 0:
        raise ClearanceFailure(f"no common clearance (worst margin {worst:.3g})")
    return worst / 8


# ---------------------------------------------------------------------------
# configurations

@dataclass(frozen=True, eq=False)
class Stack:
    spec: StackSpec
    complex: StackComplex
    reference: StackConfiguration
    clearance: float
    eps: float
    decay: float

    @property
    def tri(self) -> DiskTriangulation:
        return self.complex.tri


def build_stack(n: int, rho: float = 0.25, eps: float | None = None, decay: float = 4.0,
                retries: int = 6) -> Stack:
    """Build the stack of ``n + 1`` copies and its reference configuration.

    The reference has every copy at slide value ``-c`` and no junction
    displacement. If the junction faces degenerate, ``rho`` is halved (at
    most ``retries`` times) before giving up with :class:`RatioTooLarge`.
    """
    for _ in range(retries + 1):
        spec = StackSpec(n, rho)
        cx = _build_complex(spec)
        if _gap_ok(cx) and validate_combinatorics(cx.tri).ok:
            break
        rho /= 2
    else:
        raise RatioTooLarge("junction faces stay degenerate")
    e = default_eps(spec) if eps is None else eps
    kappa = stack_clearance(spec, e, decay)
    ref = configure(cx, np.full(spec.copies, -spec.c), np.zeros(spec.n), kappa)
    return Stack(spec, cx, ref, kappa, e, decay)


def configure(cx: StackComplex, y, s, clearance: float) -> StackConfiguration:
    """Place every copy at its slide value ``y_i`` with junction displacements ``s``."""
    spec = cx.spec
    y = np.asarray(y, dtype=float)
    s = np.asarray(s, dtype=float)
    if y.shape != (spec.copies,) or s.shape != (spec.n,):
        raise ValueError("y needs n+1 entries and s needs n")
    pos = np.zeros((cx.tri.vertex_count, 2))
    pos[list(cx.tri.boundary)] = cx.boundary.positions
    for i in range(1, spec.copies + 1):
        params = copy_params(spec, s, i)
        pl = spec.g(i, slide_state(params, float(y[i - 1]), clearance, clearance))
        for name, p in zip(("P", "L", "R"), pl):
            pos[cx.vid(i, name)] = p
        if i <= spec.n:
            pos[cx.vid(i, "G")] = spec.g(i, [0.0, 0.5]) + np.array([0.0, s[i - 1]])
    emb = GeodesicEmbedding(cx.tri, pos, cx.boundary)
    return StackConfiguration(cx, emb, y.copy(), s.copy(), clearance)


def gamma_i(stack: Stack, i: int, t: float, s=None) -> np.ndarray:
    """World positions of ``P_i, L_i, R_i`` for slide value ``t``."""
    s = np.zeros(stack.spec.n) if s is None else s
    params = copy_params(stack.spec, s, i)
    if not -stack.spec.c <= t <= stack.spec.c:
        raise ValueError("t outside [-c, c]")
    return stack.spec.g(i, slide_state(params, t, stack.clearance, stack.clearance))


def Gamma(stack: Stack, y, J=None) -> StackConfiguration:
    """Configuration with copy ``i`` at slide value ``y_i``.

    With ``J`` given, the junctions follow that subset's scheme and every
    copy outside ``J`` must be pinned (``|y_i| = c``). Without ``J`` the
    continuous :func:`displacement_field` is used.
    """
    spec = stack.spec
    y = np.asarray(y, dtype=float)
    if np.any(np.abs(y) > spec.c):
        raise ValueError("slide values must lie in [-c, c]")
    if J is None:
        s = displacement_field(spec, y, stack.eps, stack.decay)
    else:
        J = set(J)
        loose = [i for i in range(1, spec.copies + 1) if i not in J and abs(y[i - 1]) != spec.c]
        if loose:
            raise ValueError(f"copies {loose} are outside J but not pinned at +-c")
        s = freeing_perturbation(spec, J, stack.eps, stack.decay) if J else np.zeros(spec.n)
    return configure(stack.complex, y, s, stack.clearance)


def Phi(config: StackConfiguration) -> np.ndarray:
    """Slide coordinates ``x(P_i) / a_i``."""
    cx = config.complex
    xs = np.array([config.positions[cx.vid(i, "P"), 0] for i in range(1, cx.spec.copies + 1)])
    return xs / cx.spec.a


# ---------------------------------------------------------------------------
# the loop for n = 1

def _ramp(n):
    return np.linspace(0.0, 1.0, n, endpoint=False)


def build_loop_n1(stack: Stack, samples: int = 100) -> EmbeddingPath:
    """Closed loop in the configuration space of the two-copy stack.

    Four legs, each split in thirds: switch on the scheme of ``J``, slide
    the freed copy across, switch the scheme off. Legs free copy 1, then
    copy 2, then copy 1 back, then copy 2 back, so the slide vector goes
    round the square with corners ``(+-c, +-c)``.
    """
    spec = stack.spec
    if spec.n != 1:
        raise ValueError("the loop is built for n = 1")
    c = spec.c
    legs = [({1}, 0, (-c, -c), c), ({2}, 1, (c, -c), c),
            ({1}, 0, (c, c), -c), ({2}, 1, (-c, c), -c)]
    third = max(samples // 3, 1)
    sizes = (third, samples - 2 * third, third)
    frames, params, info = [], [], []
    for leg, (J, free, start, end) in enumerate(legs):
        target = freeing_perturbation(spec, J, stack.eps, stack.decay)
        y0 = np.array(start, dtype=float)
        y1 = y0.copy()
        y1[free] = end
        phases = [
            [(y0, u * target) for u in _ramp(sizes[0])],
            [(y0 + u * (y1 - y0), target) for u in _ramp(sizes[1])],
            [(y1, (1 - u) * target) for u in _ramp(sizes[2])],
        ]
        k = 0
        for ph in phases:
            for y, s in ph:
                # the slide value is set exactly at phase ends
                frames.append(configure(stack.complex, y, s, stack.clearance))
                params.append(leg + k / samples)
                k += 1
        info.append({"J": sorted(J), "free": free + 1, "start": list(start), "end": y1.tolist()})
    frames.append(frames[0])
    params.append(4.0)
    path = EmbeddingPath(np.array(params), [f.embedding for f in frames], "loop",
                         {"legs": info, "n": 1})
    path.meta["phi"] = np.array([Phi(f) for f in frames]).tolist()
    return path


def winding_number(polyline, point) -> int:
    """Signed number of turns of a closed polyline around ``point``.

    Raises
    ------
    PointOnCurve
        If ``point`` lies on the polyline.
    """
    pts = np.asarray(polyline, dtype=float)
    if not np.array_equal(pts[0], pts[-1]):
        pts = np.vstack([pts, pts[:1]])
    px, py = float(point[0]), float(point[1])
    wn = 0
    for (x0, y0), (x1, y1) in zip(pts[:-1], pts[1:]):
        cross = (x1 - x0) * (py - y0) - (px - x0) * (y1 - y0)
        if (cross == 0 and min(x0, x1) <= px <= max(x0, x1)
                and min(y0, y1) <= py <= max(y0, y1)):
            raise PointOnCurve(f"point {point} lies on the curve")
        if y0 <= py:
            if y1 > py and cross > 0:
                wn += 1
        elif y1 <= py and cross < 0:
            wn -= 1
    return wn


# ---------------------------------------------------------------------------
# boundary sphere map

@dataclass
class SphereSample:
    facet: tuple
    x: np.ndarray
    kind: str
    config: StackConfiguration = field(repr=False)


def sphere_point_to_slides(spec: StackSpec, x) -> np.ndarray:
    """Slide vector for a point of the cube boundary.

    On the facet ``x_i = +-1`` the remaining coordinates ``u`` keep their
    values on the core ``max|u| <= c`` and are pushed radially onto the
    core boundary outside it, so the collar is constant along radial
    segments.
    """
    x = np.asarray(x, dtype=float)
    c = spec.c
    i = int(np.argmax(np.abs(x)))
    if abs(abs(x[i]) - 1) > 1e-15:
        raise ValueError("point is not on the cube boundary")
    y = x.copy()
    y[i] = c * np.sign(x[i])
    rest = np.delete(np.arange(len(x)), i)
    u = x[rest]
    r = np.abs(u).max() if len(u) else 0.0
    if r > c:
        y[rest] = c * u / r
    for j in rest:
        if abs(x[j]) == 1.0:
            y[j] = c * np.sign(x[j])
    return y


def sphere_map(stack: Stack, x) -> StackConfiguration:
    return Gamma(stack, sphere_point_to_slides(stack.spec, x))


def _facet_point(m, i, sign, u):
    x = np.empty(m)
    x[i] = sign
    x[np.arange(m) != i] = u
    return x


def build_sphere_map(stack: Stack, resolution: int = 9, collar_steps: int = 4) -> list:
    """Sample the map from the cube boundary into stack configurations.

    Per facet ``x_i = +-1``: core points ``(+-1, c u)`` for ``u`` on a
    ``resolution``-point grid in ``[-1, 1]`` per free coordinate; collar
    points along the radial segments through the outer ring of that grid;
    and the ridge points of the grid (shared with a neighboring facet).
    """
    spec = stack.spec
    m = spec.copies
    c = spec.c
    grid = np.linspace(-1.0, 1.0, resolution)
    out = []
    for i in range(m):
        for sign in (-1.0, 1.0):
            for u in itertools.product(grid, repeat=m - 1):
                u = np.array(u)
                core = _facet_point(m, i, sign, c * u)
                out.append(SphereSample((i + 1, int(sign)), core, "core", sphere_map(stack, core)))
                if np.abs(u).max() == 1.0:
                    for r in np.linspace(1.0, 1.0 / c, collar_steps + 1)[1:]:
                        xc = _facet_point(m, i, sign, np.clip(r * c * u, -1, 1))
                        kind = "ridge" if np.isclose(r, 1.0 / c) else "collar"
                        out.append(SphereSample((i + 1, int(sign)), xc, kind,
                                                sphere_map(stack, xc)))
    return out


def facet_agreement(stack: Stack, resolution: int = 9) -> float:
    """Largest position difference between the two facet formulas on shared ridges."""
    spec = stack.spec
    m = spec.copies
    grid = np.linspace(-1.0, 1.0, resolution)
    worst = 0.0
    for i, j in itertools.combinations(range(m), 2):
        for si, sj in itertools.product((-1.0, 1.0), repeat=2):
            for u in itertools.product(grid, repeat=m - 2):
                x = np.empty(m)
                x[i], x[j] = si, sj
                x[[k for k in range(m) if k not in (i, j)]] = u
                # evaluate as a point of facet i and of facet j
                yi = _slides_on_facet(spec, x, i)
                yj = _slides_on_facet(spec, x, j)
                ci = Gamma(stack, yi).positions
                cj = Gamma(stack, yj).positions
                worst = max(worst, float(np.abs(ci - cj).max()))
    return worst


def _slides_on_facet(spec, x, i):
    c = spec.c
    y = np.asarray(x, dtype=float).copy()
    y[i] = c * np.sign(x[i])
    rest = np.delete(np.arange(len(x)), i)
    u = y[rest]
    r = np.abs(u).max() if len(u) else 0.0
    if r > c:
        y[rest] = c * u / r
    return y


# ---------------------------------------------------------------------------
# obstruction

def required_rise(spec: StackSpec, i: int, s_below, t=None):
    """Least world rise of junction ``i`` for copy ``i`` to sit at ``t`` (default ``t0``).

    With the junction below displaced by ``s_below``, copy ``i`` is feasible
    at ``t`` iff its own top junction rises strictly more than this.
    """
    t = T0 if t is None else t
    a = spec.a[i - 1]
    return a * (h(t, spec.k - s_below / a, spec.c) - 0.5)


def certify_obstruction(spec: StackSpec, s_range: float = 0.05, samples: int = 201) -> dict:
    """Chain argument that no configuration has every slide value at ``t0``.

    ``m_i(s) = a_i (h(t0, k - s/a_i) - 1/2)`` is the strict lower bound on the
    rise of junction ``i`` given the rise ``s`` of junction ``i - 1``. The
    certificate checks ``m_i(0) = 0`` exactly and ``m_i`` strictly increasing
    on a sampled range, then propagates ``s_0 = 0`` upward: every junction
    must rise strictly, including the fixed top vertex, which is impossible.
    """
    n = spec.n
    t0 = 3 - 2 * sympy.sqrt(2)
    c_exact = 4 * sympy.sqrt(2) - 5
    if abs(spec.c - blk.C_DERIVED) > 0:
        c_exact = sympy.nsimplify(spec.c)
    at_zero = sympy.simplify(h(t0, sympy.Rational(1, 2), c_exact) - sympy.Rational(1, 2))
    chain = []
    lower = 0.0
    strict = False
    for i in range(1, n + 2):
        a = spec.a[i - 1]
        grid = np.linspace(-s_range * a, s_range * a, samples)
        vals = np.array([required_rise(spec, i, s) for s in grid])
        slope = float(np.polyfit(grid, vals, 1)[0])
        step = {
            "copy": i,
            "junction_below": i - 1,
            "junction_above": i,
            "m_at_zero_exact": str(at_zero),
            "slope": slope,
            "increasing": bool(np.all(np.diff(vals) > 0)),
            "requirement": f"s_{i} > m_{i}(s_{i - 1})",
            "below_is_positive": strict,
            "lower_bound": max(lower, 0.0),
        }
        # s_{i-1} >= lower (strictly > 0 after the first step), m_i increasing
        lower = required_rise(spec, i, lower)
        strict = True
        step["above_must_be_positive"] = bool(at_zero == 0 and step["increasing"])
        chain.append(step)
    ok = all(st["above_must_be_positive"] for st in chain)
    return {
        "n": n,
        "t0": float(T0),
        "alpha": float((1 - spec.c) / (1 + T0)),
        "chain": chain,
        "fixed_junctions": {"s_0": 0.0, f"s_{n + 1}": 0.0},
        "contradiction_at": n + 1 if ok else None,
        "certified": ok,
    }


def fiber_search(stack: Stack, samples: int = 10 ** 6, radius: float = 1e-3,
                 rng=None, chunk: int = 100_000) -> dict:
    """Random search for configurations whose slide vector is within ``radius`` of ``t0``.

    Every copy gets ``x(P_i) = a_i (t0 + U(-radius, radius))``; ``P`` is
    lifted above its wedge, ``R``/``L`` are pushed into their sectors in a
    random direction, and junctions move vertically, all by amounts uniform
    on the natural scale of the copy (up to 5% of its size). A sample is a
    witness if all faces are positively oriented above the verification
    threshold and the faces tile the polygon.
    """
    rng = np.random.default_rng(rng)
    spec = stack.spec
    cx = stack.complex
    tri = cx.tri
    m = spec.copies
    c = spec.c
    local = blk.boundary_positions(BlockParams(k=spec.k, c=c))
    faces = tri.faces
    area = cx.boundary.area
    base = np.zeros((tri.vertex_count, 2))
    base[list(tri.boundary)] = cx.boundary.positions
    found = 0
    best = -np.inf
    done = 0
    while done < samples:
        nb = min(chunk, samples - done)
        pos = np.broadcast_to(base, (nb,) + base.shape).copy()
        s = np.stack([spec.a[j] * rng.uniform(-0.05, 0.05, nb) for j in range(spec.n)], axis=1)
        full = np.concatenate([np.zeros((nb, 1)), s, np.zeros((nb, 1))], axis=1)
        for i in range(1, m + 1):
            a = spec.a[i - 1]
            eps_i = full[:, i - 1] / a
            t = T0 + rng.uniform(-radius, radius, nb)
            kk = spec.k - eps_i
            p = np.column_stack([t, kk * (np.abs(t) - 1) + rng.uniform(0, 0.05, nb)])
            bb, cc = local[blk.B], local[blk.C]
            bp, cp = local[blk.Bp], local[blk.Cp]
            r0 = np.column_stack([np.full(nb, c), p[:, 1] + (bb[1] - p[:, 1]) * (c - p[:, 0])
                                  / (bb[0] - p[:, 0])])
            l0 = np.column_stack([np.full(nb, -c), p[:, 1] + (bp[1] - p[:, 1]) * (-c - p[:, 0])
                                  / (bp[0] - p[:, 0])])
            r = r0 + _random_in_cone(rng, bb - r0, cc - r0) * rng.uniform(0, 0.05, (nb, 1))
            l_ = l0 + _random_in_cone(rng, bp - l0, cp - l0) * rng.uniform(0, 0.05, (nb, 1))
            for name, q in (("P", p), ("L", l_), ("R", r)):
                pos[:, cx.vid(i, name)] = a * q + np.array([0.0, spec.b[i - 1]])
            if i <= spec.n:
                pos[:, cx.vid(i, "G")] = spec.g(i, [0.0, 0.5]) + np.column_stack(
                    [np.zeros(nb), s[:, i - 1]])
        dets = face_determinants(pos, faces)
        mins = dets.min(axis=1)
        ok = (mins > ORIENT_EPS) & (np.abs(0.5 * dets.sum(axis=1) - area) <= 1e-9 * area)
        found += int(ok.sum())
        best = max(best, float(mins.max()))
        done += nb
    return {"samples": samples, "radius": radius, "witnesses": found,
            "best_min_face_det": best, "target": [float(T0)] * m}


def _random_in_cone(rng, d1, d2):
    u1 = d1 / np.linalg.norm(d1, axis=-1, keepdims=True)
    u2 = d2 / np.linalg.norm(d2, axis=-1, keepdims=True)
    w = rng.random((len(u1), 1))
    v = w * u1 + (1 - w) * u2
    return v / np.linalg.norm(v, axis=-1, keepdims=True)
