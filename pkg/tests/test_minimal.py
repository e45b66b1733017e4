import random

import pytest

from subdyn.groups import F2, Z, Ball, Box, FiniteSubset, Product, Whole, components
from subdyn.minimal import (
    CLAIMS,
    InsufficientWindowError,
    ProductShape,
    augment_ji,
    build_y_window,
    check_delta_e_minimal,
    check_pinned,
    choose_q,
    glue_through_ji,
    make_recipe,
    minimality_gaps,
    occurs_at,
    random_claims_instance,
    synth_alpha,
    verify_ji_claims,
)
from subdyn.patterns import FullShift, Pattern, PreconditionError, pattern_set, sorted_patterns
from subdyn.spaced import is_spaced, is_window_maximal

from instances import product_pdox_setup

ZF = Product(Z, F2)
FULL2 = FullShift(Z, 2)
E1 = Box(Z, [(-1, 1)]).subset()
WHOLE = Whole(Z)


@pytest.fixture(scope="module")
def z_recipe():
    return make_recipe(FULL2, E1, E1, WHOLE, Box(Z, [(-60, 60)]))


def test_choose_q_spacing():
    Q, U = choose_q(E1, E1, WHOLE, 8, Box(Z, [(-60, 60)]))
    assert set(Q) == {(0,), (4,), (-4,), (8,), (-8,), (12,), (-12,), (16,)}
    assert all(abs(p[0] - q[0]) >= 4 for p in Q for q in Q if p != q)
    assert set(U) == {(k,) for k in range(-13, 18)}


def test_choose_q_single_anchor():
    Q, U = choose_q(E1, E1, WHOLE, 1, Box(Z, [(-5, 5)]))
    assert list(Q) == [(0,)]
    assert set(U) == set(E1)


def test_choose_q_needs_room():
    with pytest.raises(InsufficientWindowError):
        choose_q(E1, E1, WHOLE, 8, Box(Z, [(-6, 6)]))


def test_synth_alpha_shows_every_pattern_in_order(z_recipe):
    r = z_recipe
    refs = sorted_patterns(pattern_set(FULL2, E1))
    E_sorted = Z.sorted(E1)
    for q, p in zip(Z.sorted(r.Q), refs):
        assert occurs_at(r.alpha, q, E_sorted, Z) == tuple(p[h] for h in E_sorted)
    assert set(r.alpha.values) == set(r.U)


def test_synth_alpha_counts_must_match():
    Q, U = choose_q(E1, E1, WHOLE, 3, Box(Z, [(-30, 30)]))
    with pytest.raises(PreconditionError):
        synth_alpha(FULL2, U, Q, E1)


def test_recipe_v_contains_udu(z_recipe):
    r = z_recipe
    assert len(r.V) == 71
    assert r.V == r.V.symmetrize()


def test_build_y_pins_alpha_on_a_maximal_spaced_set(z_recipe):
    window = Box(Z, [(-120, 120)])
    y, T = build_y_window(z_recipe, window, seed=3)
    assert len(y) == 241
    assert check_pinned(y, z_recipe.alpha, T) == []
    inner = Box(Z, [(-120 + 13, 120 - 17)])
    assert is_spaced(T, z_recipe.V)
    assert is_window_maximal(T, z_recipe.V, inner)


def test_build_y_is_seeded(z_recipe):
    window = Box(Z, [(-80, 80)])
    a = build_y_window(z_recipe, window, seed=5)
    b = build_y_window(z_recipe, window, seed=5)
    assert a[0] == b[0] and a[1] == b[1]


def test_build_y_needs_room(z_recipe):
    with pytest.raises(InsufficientWindowError):
        build_y_window(z_recipe, Box(Z, [(-5, 5)]), seed=0)


def test_minimality_of_built_family(z_recipe):
    window = Box(Z, [(-150, 150)])
    ys = [build_y_window(z_recipe, window, seed=s)[0] for s in range(4)]
    refs = pattern_set(FULL2, E1)
    assert check_delta_e_minimal(ys, WHOLE, E1, refs, window)
    radius = z_recipe.V.radius() + 30
    assert check_delta_e_minimal(ys, WHOLE, E1, refs, window, syndetic_radius=radius, margin=radius)


def test_minimality_negative_control():
    window = Box(Z, [(-20, 20)])
    zero = Pattern(Z, {g: 0 for g in window}, 2)
    refs = pattern_set(FULL2, E1)
    gaps = minimality_gaps([zero], WHOLE, E1, refs, window)
    assert len(gaps) == 7 and all(idx == 0 and c is None for idx, _, c in gaps)
    assert check_delta_e_minimal([zero], WHOLE, E1, [Pattern(Z, {g: 0 for g in E1}, 2)], window)
    with pytest.raises(InsufficientWindowError):
        minimality_gaps([zero], WHOLE, Box(Z, [(-30, 30)]).subset(), refs, window)


# -- augmentation over Z x F2 ---------------------------------------------------

SHAPE = ProductShape(ZF, ((0,), (1,)), 1, ((0,),), 2)


def test_augment_without_anchors_returns_s():
    S = FiniteSubset(ZF, [((0,), "aaaa"), ((1,), "b")])
    assert augment_ji(S, [], SHAPE) == S


def test_augment_adds_a_segment_for_a_close_component():
    # Ug is the F2-ball of radius 1 around e on cosets 0 and 1;
    # a point at distance r + n = 3 gets joined on its own coset only.
    S = FiniteSubset(ZF, [((0,), "aaa")])
    J = augment_ji(S, [((0,), "")], SHAPE)
    expected = set(S) | SHAPE.U_at(((0,), "")) | {((0,), "aa")}
    assert set(J) == expected
    slice0 = {x for c, x in J if c == (0,)}
    assert len(components(F2, slice0)) == 1


def test_augment_leaves_far_components_alone():
    S = FiniteSubset(ZF, [((0,), "aaaa")])
    J = augment_ji(S, [((0,), "")], SHAPE)
    assert set(J) == set(S) | SHAPE.U_at(((0,), ""))


def test_augment_rejects_two_close_components():
    S = FiniteSubset(ZF, [((0,), "aa"), ((0,), "bb")])
    with pytest.raises(PreconditionError):
        augment_ji(S, [((0,), "")], SHAPE)


def test_single_piece_claims():
    S = FiniteSubset(ZF, [((0,), ""), ((0,), "a")])
    report = verify_ji_claims([S], [[]], [], SHAPE)
    assert report.ok and report.J[0] == S
    assert {r.claim for r in report.results} == {"containment", "stays_local", "tree_class"}


@pytest.mark.parametrize("r,n", [(0, 1), (1, 1), (1, 2), (2, 2)])
def test_random_instances_satisfy_the_claims(r, n):
    shape = ProductShape(ZF, ((-1,), (0,), (1,)), r, ((0,),), n)
    rng = random.Random(100 * r + n)
    for _ in range(8):
        inst = random_claims_instance(shape, rng)
        report = verify_ji_claims(inst.S_list, inst.B_list, inst.B_extra, shape)
        assert report.ok, report.failures()[:3]
        assert all(report.verdict(c) for c in CLAIMS)


def test_anchor_apartness_can_fail_with_the_weaker_v():
    shape = ProductShape(ZF, ((-1,), (0,), (1,)), 1, ((0,),), 2)
    rng = random.Random(0)
    failures = []
    for _ in range(150):
        inst = random_claims_instance(shape, rng, mode="UDU")
        report = verify_ji_claims(inst.S_list, inst.B_list, inst.B_extra, shape)
        failures += report.failures()
        if failures:
            break
    assert failures and {f.claim for f in failures} == {"anchors_apart"}
    assert failures[0].witness["pair"] is not None


def test_end_to_end_gluing_through_the_augmented_pieces():
    recipe, shape = product_pdox_setup()
    rng = random.Random(9)
    for seed in range(3):
        inst = random_claims_instance(shape, rng)
        res = glue_through_ji(recipe.shift, recipe.alpha, inst, seed)
        assert recipe.shift.is_valid(res.y)
        for S, y_i in zip(inst.S_list, res.y_list):
            assert all(res.y[g] == y_i[g] for g in S)
        anchors = [g for B in inst.B_list for g in B] + list(inst.B_extra)
        assert check_pinned(res.y, recipe.alpha, anchors) == []


def test_product_recipe_shape():
    recipe, shape = product_pdox_setup()
    assert len(recipe.Q) == 12 and len(recipe.alpha) == 13 * 5
    assert shape.N == 4 * 1 + 3 * 4
    assert recipe.N == shape.N
    assert isinstance(recipe.U.right, Ball)
