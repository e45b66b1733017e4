import random

import pytest

from subdyn.groups import F2, Z, Ball, Box, FiniteSubset
from subdyn.patterns import FullShift, Infeasible, InvalidFixedData, Pattern, PreconditionError
from subdyn.shifts import (
    ArrowAssignment,
    ColorShift,
    PdoxShift,
    build_gadget,
    check_g_free,
    color_sample,
    decode_symbol,
    encode_pair,
    find_g_fixed,
    gadget_level,
    pdox_extend,
    pdox_feasible,
    pdox_hall_check,
    pdox_non_irreducible_witness,
    pdox_propagate,
    pdox_validate,
)

from instances import random_pdox_instance
from oracles import (
    pdox_all_extensions,
    pdox_feasible_exhaustive,
    pdox_valid_quadratic,
    proper_coloring,
)


def arrows(**kw):
    return ArrowAssignment({("" if k == "e" else k): tuple(v) for k, v in kw.items()})


def test_symbol_encoding_roundtrip():
    for v in range(16):
        assert encode_pair(decode_symbol(v)) == v
    assert decode_symbol(encode_pair(("b", "A"))) == ("b", "A")


def test_validate_examples():
    assert pdox_validate(ArrowAssignment())
    assert not pdox_validate(arrows(e="aa"))
    assert pdox_validate(arrows(e="ab", a="ab"))
    # e -> b and Ba -> b collide
    assert not pdox_validate(arrows(e="ab", Ba="bA"))


def test_validate_matches_quadratic_oracle():
    rng = random.Random(5)
    cells = F2.ball(2)
    for _ in range(400):
        chosen = rng.sample(cells, rng.randint(1, 6))
        x = {g: tuple(rng.sample("abAB", 2)) for g in chosen}
        assert pdox_validate(ArrowAssignment(x)) == pdox_valid_quadratic(x)


def test_hall_check_examples():
    assert not pdox_hall_check([""], ["a", "b", "A", "B"])
    assert pdox_hall_check([""], [])
    assert pdox_hall_check([], ["a"])


def test_extend_empty_ball():
    y = pdox_extend(ArrowAssignment(), Ball(F2, 2))
    assert len(y) == 17 and pdox_valid_quadratic(y.arrows)


def test_extend_keeps_a_total_assignment():
    y = pdox_extend(ArrowAssignment(), Ball(F2, 2), random.Random(1))
    assert pdox_extend(y, Ball(F2, 2)) == y


def test_four_arrows_into_the_identity_are_infeasible():
    x = arrows(a="Ab", b="Ba", A="ab", B="ba")
    with pytest.raises(Infeasible):
        pdox_extend(x, Ball(F2, 1))
    assert not pdox_feasible_exhaustive(x.arrows, F2.ball(1))


def test_invalid_fixed_data_is_both_error_kinds():
    with pytest.raises(InvalidFixedData) as info:
        pdox_extend(arrows(e="aa"), Ball(F2, 1))
    assert isinstance(info.value, PreconditionError) and isinstance(info.value, Infeasible)


def test_fixed_cell_outside_window():
    with pytest.raises(PreconditionError):
        pdox_extend(arrows(aaa="ab"), Ball(F2, 1))


def test_extend_matches_exhaustive_search():
    rng = random.Random(11)
    for _ in range(60):
        radius, cells, fixed = random_pdox_instance(rng, max_free=5)
        expected = pdox_feasible_exhaustive(fixed, cells)
        assert pdox_feasible(ArrowAssignment(fixed), Ball(F2, radius)) == expected


def test_infeasible_comes_with_a_hall_witness():
    # aa, bb and AA use up a, b and A, leaving e a single free neighbour
    x = arrows(aa="Ab", bb="Ba", AA="ab")
    assert pdox_validate(x)
    with pytest.raises(Infeasible) as info:
        pdox_extend(x, Ball(F2, 2))
    witness = info.value.witness
    assert "" in witness
    assert not pdox_hall_check(witness, x.all_targets())


def test_extension_is_monotone_in_the_radius():
    rng = random.Random(3)
    for r in (1, 2, 3):
        y = pdox_extend(ArrowAssignment(), Ball(F2, r), rng)
        for grow in (1, 2):
            z = pdox_extend(y, Ball(F2, r + grow), rng)
            assert z.restrict(y.domain) == y and pdox_validate(z)


def test_disconnected_window_is_hulled():
    x = arrows(e="ab")
    y = pdox_extend(x, FiniteSubset(F2, ["", "aaa"]))
    assert {"", "a", "aa", "aaa"} <= set(y.domain)


def test_propagation_examples():
    st = pdox_propagate(ArrowAssignment(), Ball(F2, 2))
    assert st.consistent and len(st.deduced) == 0
    st = pdox_propagate(arrows(aa="Ab", bb="Ba", AA="ab"), Ball(F2, 2))
    assert st.consistent is False and st.contradiction == ""
    clash = pdox_propagate(arrows(a="Ab", b="Ba"), Ball(F2, 1))
    assert clash.status == "Contradiction" and clash.contradiction == ""


def _target_set(x, g):
    return frozenset(x.targets(g))


def test_propagation_is_sound():
    rng = random.Random(8)
    checked = 0
    for _ in range(80):
        radius, cells, fixed = random_pdox_instance(rng, max_free=4)
        if not pdox_valid_quadratic(fixed):
            continue
        st = pdox_propagate(ArrowAssignment(fixed), cells)
        exts = pdox_all_extensions(fixed, cells)
        if not st.consistent:
            assert not exts
            continue
        for ext in exts:
            e = ArrowAssignment(ext)
            for g, _ in st.deduced.items():
                assert _target_set(e, g) == _target_set(st.deduced, g)
        checked += 1
    assert checked > 20


@pytest.mark.parametrize("k", [1, 2])
def test_gadget_forces_the_root(k):
    g = build_gadget("", "a", k)
    assert len(g.leaves) == 2**k
    window = Ball(F2, 2 * k + 2)
    st = pdox_propagate(g.arrows, window)
    assert st.consistent
    assert "" in st.deduced.targets("a")
    # every internal v is forced towards its u
    for s, v in g.v.items():
        if len(s) < k:
            assert g.u[s] in st.deduced.targets(v)


def test_gadget_levels():
    assert [gadget_level(n) for n in range(1, 10)] == [1] * 5 + [2] * 4
    with pytest.raises(ValueError):
        gadget_level(0)


@pytest.mark.parametrize("n", range(1, 10))
def test_non_irreducibility_witness(n):
    w = pdox_non_irreducible_witness(n)
    d = min(F2.distance(s, t) for s in w.S0 for t in w.S1)
    assert d > n
    for x in (w.x0, w.x1):
        assert pdox_validate(pdox_extend(x, w.window))
    assert not pdox_feasible(w.x0.union(w.x1), w.window)
    assert w.infeasible.reason == "hall"


def test_pdox_shift_wraps_arrows():
    shift = PdoxShift()
    p = arrows(e="ab", a="ab").to_pattern()
    assert shift.is_valid(p)
    y = shift.extend(p, Ball(F2, 2))
    assert shift.is_valid(y) and y.restrict(p.domain) == p


def test_color_sample_is_proper():
    for seed in range(5):
        y = color_sample(Ball(F2, 1), 5, Ball(F2, 4), seed)
        assert len(y) == F2.ball_size(4)
        assert proper_coloring(y.values, F2.ball(1), F2.multiply)
    assert len(color_sample(Ball(F2, 1), 3, FiniteSubset(F2, ["ab"]), 0)) == 1


def test_color_sample_is_seeded():
    a = color_sample(Ball(F2, 1), 6, Ball(F2, 3), 4)
    assert a == color_sample(Ball(F2, 1), 6, Ball(F2, 3), 4)


def test_color_exhaustion():
    with pytest.raises(Infeasible) as info:
        color_sample(Ball(F2, 2), 2, Ball(F2, 2), 0)
    assert info.value.reason == "color-exhaustion"


def test_color_pattern_validity():
    shift = ColorShift(F2, Ball(F2, 1), 5)
    assert shift.is_valid(Pattern(F2, {"": 0, "aa": 0}, 5))
    assert not shift.is_valid(Pattern(F2, {"": 0, "a": 0}, 5))


def test_g_freeness_by_sampling():
    color = ColorShift(F2, Ball(F2, 1), 5)
    assert check_g_free(color, "a", Ball(F2, 3), 10, seed=0)
    full = FullShift(Z, 2)
    window = Box(Z, [(-10, 10)])
    assert check_g_free(full, (1,), window, 10, seed=0)
    constant = Pattern(Z, {g: 0 for g in window}, 2)
    assert not check_g_free(full, (1,), window, 10, seed=0, samples=[constant])
    assert find_g_fixed(full, (1,), window, 0, 0, samples=[constant]) == constant
    with pytest.raises(PreconditionError):
        check_g_free(full, (0,), window, 1, 0)
