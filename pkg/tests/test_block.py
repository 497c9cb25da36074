import logging
import math

import numpy as np
import pytest
import sympy

from geotri.block import (BLOCK_TRI, C_DERIVED, C_PRINTED, FACES, T0, BlockParams,
                          InvalidParams, Perturbation, boundary_positions, build_block,
                          c_discrepancy, classify_perturbation, dh_dk, exact_params,
                          feasibility_margin, feasibility_oracle, feasible_t, gamma,
                          gamma_clearance, gamma_path, golden_section_max, h, h_expanded,
                          h_max, solve_c)
from geotri.geometry import verify_embedding
from geotri.mesh import validate_combinatorics


def _intercept_oracle(t, k, c):
    # P on the wedge, then two line intersections and the ordinate at x = 0
    p = np.array([t, k * (t - 1)])

    def meet(q, x):
        d = q - p
        s = (x - p[0]) / d[0]
        return p + s * d

    r = meet(np.array([1.0, 1.0]), c)
    l_ = meet(np.array([-1.0, 1.0]), -c)
    return (r[1] + l_[1]) / 2


def test_h_geometric_oracle(rng):
    ts = rng.uniform(0, 0.95, 1000)
    ks = rng.uniform(0.05, 2.0, 1000)
    for t, k in zip(ts, ks):
        assert abs(h(t, k) - _intercept_oracle(t, k, C_DERIVED)) <= 1e-12
        assert abs(h_expanded(t, k) - h(t, k)) <= 1e-12


def test_h_forms_equal_symbolically():
    t, k, c = sympy.symbols("t k c")
    assert sympy.simplify(h(t, k, c) - h_expanded(t, k, c)) == 0


def test_h_decreasing_in_k(rng):
    for t, k in zip(rng.uniform(0.01, 0.99, 500), rng.uniform(0.05, 2, 500)):
        fd = (h(t, k + 1e-6) - h(t, k - 1e-6)) / 2e-6
        assert fd < 0
        assert fd == pytest.approx(dh_dk(t), rel=1e-6)


def test_h_at_zero():
    for k in (0.1, 0.5, 1.3):
        assert h(0.0, k) == pytest.approx(1 + (k + 1) * (C_DERIVED - 1), abs=1e-15)


def test_h_max_closed_form():
    m = h_max(0.5)
    assert m.t_star == pytest.approx(T0, abs=1e-15)
    assert m.value == pytest.approx(0.5, abs=1e-15)
    for k in (0.2, 0.5, 1.5):
        for c in (0.4, C_DERIVED, 0.9):
            t, v = golden_section_max(lambda s: h(s, k, c), 0, c)
            if h_max(k, c).t_star < c:
                assert t == pytest.approx(h_max(k, c).t_star, abs=1e-9)
                assert v == pytest.approx(h_max(k, c).value, abs=1e-12)


def test_exact_identity():
    assert sympy.simplify(h(3 - 2 * sympy.sqrt(2), sympy.Rational(1, 2),
                            4 * sympy.sqrt(2) - 5) - sympy.Rational(1, 2)) == 0


def test_solve_c_and_grid(caplog):
    with caplog.at_level(logging.WARNING, logger="geotri.block"):
        c = solve_c()
    assert abs(c - (4 * math.sqrt(2) - 5)) <= 1e-12
    assert any("printed c" in r.message for r in caplog.records)
    ts = np.linspace(0, c, 100_000)
    vals = h(ts, 0.5, c)
    assert np.all(vals[np.abs(ts - T0) > 1e-7] < 0.5)


def test_printed_c_breaks_identity():
    d = c_discrepancy()
    assert d["c_printed"] == C_PRINTED
    assert d["h0_printed"] == pytest.approx(0.660, abs=1e-3)
    assert d["h_max_printed"] > 0.5
    assert d["h_max_derived"] == pytest.approx(0.5, abs=1e-15)


@pytest.mark.parametrize("eps,delta,want", [
    (-0.01, 0, Perturbation.ADMISSIBLE),
    (0, -0.01, Perturbation.FORBIDDEN),
    (0.01, 0.02, Perturbation.UNCLASSIFIED),
    (0.01, 0.05, Perturbation.ADMISSIBLE),
    (0.02, 0, Perturbation.FORBIDDEN),
    (0, 0.01, Perturbation.ADMISSIBLE),
    (-0.05, -0.01, Perturbation.ADMISSIBLE),
])
def test_classify(eps, delta, want):
    assert classify_perturbation(eps, delta) == want


def test_block_counts():
    assert validate_combinatorics(BLOCK_TRI).ok
    assert (BLOCK_TRI.n_interior, BLOCK_TRI.n_boundary, BLOCK_TRI.n_faces) == (3, 10, 14)
    assert len(BLOCK_TRI.edges) == 26
    assert len(BLOCK_TRI.interior_edges) - 9 == 7 == len(BLOCK_TRI.boundary_edges) - 3
    assert len(FACES) == 14
    b = build_block()
    assert verify_embedding(b.reference, paranoid=True).passed


def test_unperturbed_cosines():
    p = boundary_positions(BlockParams())
    A, G, Dp, D, Ap, K = p[0], p[4], p[5], p[3], p[8], p[9]

    def cos(u, v, w):
        a, b = u - v, w - v
        return a @ b / np.linalg.norm(a) / np.linalg.norm(b)

    assert cos(Ap, K, A) == pytest.approx(-3 / 5, abs=1e-15)
    assert cos(Dp, G, D) == pytest.approx(-3 / 5, abs=1e-12)


def test_invalid_params():
    with pytest.raises(InvalidParams):
        BlockParams(k=-1)
    with pytest.raises(InvalidParams):
        BlockParams(c=0.1)


def test_feasible_examples():
    p0 = BlockParams()
    assert not feasible_t(p0, T0) and not feasible_t(p0, -T0)
    assert feasible_t(p0, 0.0) and feasible_t(p0, 0.9) and feasible_t(p0, -0.5)
    assert not feasible_t(exact_params(), 3 - 2 * sympy.sqrt(2))
    assert feasible_t(exact_params(), sympy.Rational(1, 10))
    assert feasible_t(BlockParams(eps=0.01, delta=0.05), T0)
    p = BlockParams(delta=-0.01)
    ts = np.linspace(T0 - 0.1, T0 + 0.1, 201)
    bad = ts[[not feasible_t(p, t) for t in ts]]
    assert bad.min() < T0 < bad.max()
    # an interval: contiguous on the grid
    idx = np.flatnonzero([not feasible_t(p, t) for t in ts])
    assert np.all(np.diff(idx) == 1)
    with pytest.raises(ValueError):
        feasible_t(p0, 1.0)


def test_margin_signs():
    for e, d in [(-0.02, 0), (0, 0.02), (0.01, 0.05), (-0.03, -0.005)]:
        ts = np.linspace(-C_DERIVED, C_DERIVED, 401)
        assert min(feasibility_margin(BlockParams(eps=e, delta=d), t) for t in ts) > 0
    for e, d in [(0, -0.01), (0.02, 0)]:
        assert feasibility_margin(BlockParams(eps=e, delta=d), T0) <= 0


def test_gamma_path_and_mirror():
    p = BlockParams(eps=-0.02)
    ts = np.linspace(-C_DERIVED, C_DERIVED, 41)
    path = gamma_path(p, ts)
    assert path.verify(paranoid=True) == []
    assert all(f.positions[10, 0] == t for f, t in zip(path, ts))
    kap = gamma_clearance(p, ts)
    perm = [8, 7, 6, 5, 4, 3, 2, 1, 0, 9, 10, 12, 11]
    for t in (0.05, 0.3, C_DERIVED):
        a = gamma(p, t, kap).positions
        b = gamma(p, -t, kap).positions
        assert np.abs(a[perm] * [-1, 1] - b).max() <= 1e-12
    with pytest.raises(ValueError):
        gamma(p, 0.9)


@pytest.mark.parametrize("t", [-C_DERIVED, 0.0, 0.5, 0.9])
def test_oracle_finds_witness(t):
    res = feasibility_oracle(BlockParams(), t, resolution=60)
    assert res.found
    assert res.witness.positions[10, 0] == t
    assert verify_embedding(res.witness, paranoid=True).passed


def test_oracle_admissible_at_t0():
    res = feasibility_oracle(BlockParams(eps=-0.05), T0, resolution=60)
    assert res.found


def test_oracle_agrees_with_predicate(rng):
    # predicate feasible -> oracle finds a witness
    p = BlockParams(delta=-0.01)
    for t in rng.uniform(-0.95, 0.95, 8):
        if feasible_t(p, t):
            assert feasibility_oracle(p, t, resolution=60).found, t
