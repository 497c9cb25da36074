import numpy as np
import pytest

from geotri.block import C_DERIVED as C, T0, feasible_t
from geotri.mesh import count_weight_dofs, dimension_of_x, validate_combinatorics
from geotri.stack import (Gamma, NotStrictSubset, Phi, PointOnCurve, StackSpec, build_loop_n1,
                          build_sphere_map, build_stack, certify_obstruction, chains,
                          copy_params, displacement_field, facet_agreement, fiber_search,
                          freeing_perturbation, required_rise, sphere_point_to_slides,
                          strict_subsets, winding_number)


@pytest.fixture(scope="module")
def stack1():
    return build_stack(1)


@pytest.fixture(scope="module")
def stack2():
    return build_stack(2)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_counts(n):
    st = build_stack(n)
    tri = st.tri
    assert validate_combinatorics(tri).ok
    assert tri.n_interior == 4 * n + 3
    assert tri.n_faces == 2 * tri.n_interior + tri.n_boundary - 2
    assert st.reference.verify(paranoid=True).passed
    assert count_weight_dofs(tri).direct > 0
    if n == 2:
        assert dimension_of_x(tri) == 22


def test_spec_scales():
    sp = StackSpec(3)
    assert np.array_equal(sp.a, [1, 0.25, 0.0625, 0.015625])
    assert np.array_equal(np.diff(sp.b), sp.a[:-1] / 2 + sp.a[1:] / 2)
    local = np.array([[0.0, 0.5], [0.0, -0.5]])
    for i in range(1, 3):
        # G_i = K_{i+1}, exactly
        assert np.array_equal(sp.g(i, local[0]), sp.g(i + 1, local[1]))


def test_junction_ids(stack2):
    cx = stack2.complex
    for i in (1, 2):
        assert cx.vid(i, "G") == cx.vid(i + 1, "K")
        assert not cx.tri.is_boundary[cx.vid(i, "G")]
    assert cx.tri.is_boundary[cx.vid(1, "K")] and cx.tri.is_boundary[cx.vid(3, "G")]


def test_chains():
    assert chains({1, 2, 4, 6, 7}) == [[1, 2], [4], [6, 7]]
    assert chains(set()) == []


def test_freeing_scheme_frees_copies(stack2):
    spec = stack2.spec
    for J in strict_subsets(spec.copies):
        s = freeing_perturbation(spec, J)
        for j in J:
            assert feasible_t(copy_params(spec, s, j), T0), (sorted(J), j)
    with pytest.raises(NotStrictSubset):
        freeing_perturbation(spec, {1, 2, 3})
    with pytest.raises(NotStrictSubset):
        freeing_perturbation(spec, {4})


def test_decay_three_not_enough(stack2):
    # with the derived constants the slope of the max intercept is below 1/3
    spec = stack2.spec
    s = freeing_perturbation(spec, {2, 3}, eps=0.01, decay=3)
    assert not feasible_t(copy_params(spec, s, 2), T0)


def test_displacement_field_matches_schemes(stack2):
    spec = stack2.spec
    y = np.array([-C, 0.0, C])
    s = displacement_field(spec, y, stack2.eps, stack2.decay)
    assert np.allclose(s, freeing_perturbation(spec, {2}, stack2.eps, stack2.decay), atol=0)
    assert np.array_equal(displacement_field(spec, np.full(3, C)), np.zeros(2))


def test_gamma_random(stack2, rng):
    for _ in range(30):
        y = rng.uniform(-C, C, 3)
        y[rng.integers(3)] = C * rng.choice([-1, 1])
        cfg = Gamma(stack2, y)
        assert cfg.verify().passed, y
        assert np.array_equal(Phi(cfg), y)


def test_gamma_pinning_required(stack2):
    with pytest.raises(ValueError):
        Gamma(stack2, [0.0, 0.0, 0.0], J={1})


def test_winding_number_oracle():
    sq = np.array([[0, 0], [1, 0], [1, 1], [0, 1], [0, 0]], float)
    assert winding_number(sq, (0.5, 0.5)) == 1
    assert winding_number(sq[::-1], (0.5, 0.5)) == -1
    assert winding_number(sq, (2, 0.5)) == 0
    twice = np.vstack([sq, sq[1:]])
    assert winding_number(twice, (0.3, 0.6)) == 2
    with pytest.raises(PointOnCurve):
        winding_number(sq, (0.5, 0.0))


def test_loop(stack1):
    loop = build_loop_n1(stack1, samples=30)
    assert np.array_equal(loop[0].positions, loop[-1].positions)
    assert loop.verify() == []
    phi = np.array(loop.meta["phi"])
    assert winding_number(phi, (T0, T0)) == 1
    assert winding_number(phi, (2, 2)) == 0


def test_sphere_point_to_slides():
    sp = StackSpec(2)
    assert np.array_equal(sphere_point_to_slides(sp, [1.0, 0.1, -0.2]), [C, 0.1, -0.2])
    y = sphere_point_to_slides(sp, [-1.0, 0.9, 0.0])
    assert y[0] == -C and y[1] == pytest.approx(C)
    with pytest.raises(ValueError):
        sphere_point_to_slides(sp, [0.5, 0.2, 0.1])


def test_sphere_map_n1(stack1):
    out = build_sphere_map(stack1, resolution=5, collar_steps=2)
    assert all(s.config.verify().passed for s in out)
    for s in out:
        if s.kind == "core":
            pinned = np.abs(s.x) == 1
            assert np.array_equal(Phi(s.config), np.where(pinned, C * s.x, s.x))
    assert facet_agreement(stack1, resolution=5) <= 1e-10


def test_certificate():
    for n in (1, 2, 3):
        cert = certify_obstruction(StackSpec(n))
        assert cert["certified"]
        assert cert["contradiction_at"] == n + 1
        assert len(cert["chain"]) == n + 1
        assert all(st["m_at_zero_exact"] == "0" for st in cert["chain"])


def test_required_rise_monotone():
    sp = StackSpec(2)
    s = np.linspace(-0.01, 0.01, 21)
    r = np.array([required_rise(sp, 2, x) for x in s])
    assert np.all(np.diff(r) > 0)
    assert abs(required_rise(sp, 2, 0.0)) < 1e-15


def test_fiber_search_small(stack1):
    res = fiber_search(stack1, samples=20_000, rng=1)
    assert res["witnesses"] == 0
