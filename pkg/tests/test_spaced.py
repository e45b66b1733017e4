import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from subdyn.groups import F2, Z, Z2, Ball, Box, Cyclic, FiniteSubset
from subdyn.spaced import (
    InvalidSeedError,
    are_apart,
    conjugate_core,
    greedy_maximal_spaced,
    is_spaced,
    is_syndetic_on_window,
    is_window_maximal,
    ufo_falsify,
    ufo_whisker_shape,
)

from oracles import maximal_in, spaced_pairwise

ROW = Cyclic(Z2, (1, 0))


def zs(*xs):
    return FiniteSubset(Z, [(x,) for x in xs])


def test_is_spaced_examples():
    U = Z.ball(1)
    assert is_spaced(zs(0, 2, 4), FiniteSubset(Z, U))
    assert not is_spaced(zs(0, 1), FiniteSubset(Z, U))
    assert is_spaced(zs(5), FiniteSubset(Z, U))
    # one-sided: h in U g is asymmetric when U is
    U1 = zs(0, 1)
    assert not is_spaced(zs(0, 1), U1)
    assert is_spaced(zs(0, 2), U1)


def test_greedy_on_z():
    S = greedy_maximal_spaced(FiniteSubset(Z, Z.ball(1)), Box(Z, [(-5, 5)]))
    assert set(S) == {(0,), (2,), (-2,), (4,), (-4,)}


def test_greedy_keeps_seed_and_rejects_bad_seeds():
    U = FiniteSubset(Z, Z.ball(2))
    S = greedy_maximal_spaced(U, Box(Z, [(-9, 9)]), seed=[(1,)])
    assert (1,) in S and is_spaced(S, U)
    with pytest.raises(InvalidSeedError):
        greedy_maximal_spaced(U, Box(Z, [(-9, 9)]), seed=[(0,), (1,)])
    with pytest.raises(InvalidSeedError):
        greedy_maximal_spaced(U, Box(Z, [(-9, 9)]), seed=[(40,)])


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_greedy_matches_oracles_on_z2(seed):
    rng = random.Random(seed)
    U = {(0, 0)} | {(rng.randint(-2, 2), rng.randint(-2, 2)) for _ in range(rng.randint(1, 4))}
    U = FiniteSubset(Z2, U)
    window = Box(Z2, [(-4, 4), (-4, 4)])
    pts = list(window)
    rng.shuffle(pts)
    S = greedy_maximal_spaced(U, window, order=pts)
    mul, inv = Z2.multiply, Z2.inverse
    assert spaced_pairwise(S, U, mul, inv)
    assert maximal_in(S, U, window, mul, inv)
    assert is_window_maximal(S, U, window)
    assert is_syndetic_on_window(S, U | U.inverse(), window, margin=U.radius())


def test_greedy_on_free_group():
    U = FiniteSubset(F2, F2.ball(1))
    S = greedy_maximal_spaced(U, Ball(F2, 3))
    assert is_spaced(S, U)
    assert maximal_in(S, U, F2.ball(3), F2.multiply, F2.inverse)


def test_syndetic_needs_a_nonempty_inner_window():
    with pytest.raises(Exception):
        is_syndetic_on_window(zs(0), FiniteSubset(Z, Z.ball(1)), Box(Z, [(-1, 1)]), margin=5)


def test_are_apart():
    D1 = FiniteSubset(F2, F2.ball(1))
    assert are_apart(FiniteSubset(F2, [""]), FiniteSubset(F2, ["aa"]), D1)
    assert not are_apart(FiniteSubset(F2, [""]), FiniteSubset(F2, ["a"]), D1)
    assert are_apart(FiniteSubset(F2, []), FiniteSubset(F2, ["a"]), D1)
    D4 = Ball(F2, 4)
    assert are_apart(FiniteSubset(F2, [""]), FiniteSubset(F2, ["aaaaa"]), D4)
    assert not are_apart(FiniteSubset(F2, [""]), FiniteSubset(F2, ["aaaaa"]), Ball(F2, 5))


def test_ufo_search_finds_disk_counterexample():
    rep = ufo_falsify(FiniteSubset(Z2, Z2.ball(2)), ROW, Box(Z2, [(-12, 12), (-12, 12)]), 200, seed=1)
    assert rep.found
    S = rep.counterexample
    V = FiniteSubset(Z2, Z2.ball(2))
    assert is_spaced(S, V) and is_window_maximal(S, V, Box(Z2, [(-12, 12), (-12, 12)]))
    assert all(ROW.coset_key(s) != ROW.coset_key(rep.missed_coset) for s in S)


def test_ufo_search_is_deterministic():
    args = (FiniteSubset(Z2, Z2.ball(2)), ROW, Box(Z2, [(-8, 8), (-8, 8)]), 20)
    a, b = ufo_falsify(*args, seed=7), ufo_falsify(*args, seed=7)
    assert a.verdict == b.verdict and a.counterexample == b.counterexample


def test_ufo_search_in_free_group():
    rep = ufo_falsify(FiniteSubset(F2, F2.ball(2)), Cyclic(F2, "a"), Ball(F2, 6), 50, seed=0)
    assert rep.found


def test_ufo_search_without_room_reports_nothing():
    rep = ufo_falsify(FiniteSubset(Z2, Z2.ball(3)), ROW, Box(Z2, [(-1, 1), (-1, 1)]), 5, seed=0)
    assert not rep.found and rep.trials_used == 0


def test_whisker_shape():
    W = ufo_whisker_shape(7, 23)
    assert len(W) == 149 + 46
    assert W == W.symmetrize()
    assert (30, 0) in W and (31, 0) not in W and (0, 7) in W and (4, 5) in W and (5, 5) not in W


def test_thin_whiskers_force_every_row():
    # With a plus-shaped core, off-row points block at most one row cell
    # each, so every long row segment needs a point of its own.
    V = ufo_whisker_shape(1, 3)
    rep = ufo_falsify(V, ROW, Box(Z2, [(-20, 20), (-6, 6)]), 30, seed=2)
    assert not rep.found


# A horizontally periodic set (period 61) that is spaced for the (7, 23)
# whisker shape and blocks every point of row 0. Any maximal spaced set
# containing it misses that row.
PERIODIC_BLOCKER = [
    (4, -3), (4, 7), (10, -7), (10, 1), (19, 3), (20, -4), (27, 5),
    (31, -1), (39, -2), (45, -6), (49, 6), (57, -5), (59, 2),
]


def test_whisker_shape_is_not_a_ufo():
    V = ufo_whisker_shape(7, 23)
    period = 61
    lift = FiniteSubset(Z2, [(x + k * period, y) for x, y in PERIODIC_BLOCKER for k in range(-3, 4)])
    assert is_spaced(lift, V)
    assert spaced_pairwise(lift, V, Z2.multiply, Z2.inverse)
    # every row-0 point of one period is blocked
    for x in range(period):
        assert any(Z2.multiply((x, 0), Z2.inverse(s)) in V for s in lift)


def test_conjugate_core():
    U = FiniteSubset(F2, ["", "b"])
    D = FiniteSubset(F2, ["a" * k for k in range(4)] + ["A" * k for k in range(1, 4)])
    assert set(conjugate_core(U, D)) == {""}
    D2 = FiniteSubset(Z2, Z2.ball(2))
    assert conjugate_core(FiniteSubset(Z2, Z2.ball(1)), D2) == D2
