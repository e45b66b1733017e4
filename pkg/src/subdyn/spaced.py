"""Spaced, syndetic and apart sets; maximal spaced sets; UFO falsification."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .groups import (
    Box,
    FiniteSubset,
    GroupSpec,
    Lattice,
    SpecMismatchError,
    Window,
    Z2,
    as_subset,
    window_inner,
)
from .rng import derive_rng

# Above this many elements a shape is tested by membership instead of expansion.
_EXPAND_LIMIT = 20_000


class InvalidSeedError(ValueError):
    pass


def _spec_of(*sets) -> GroupSpec:
    specs = {s.spec for s in sets if hasattr(s, "spec")}
    if len(specs) > 1:
        raise SpecMismatchError(f"sets from different groups: {specs}")
    if not specs:
        raise ValueError("cannot infer the group of plain collections")
    return specs.pop()


def _small(U) -> bool:
    if isinstance(U, Window):
        return U.size() <= _EXPAND_LIMIT
    return True


def _in_translate(spec: GroupSpec, U, x, y) -> bool:
    """``x in U y``."""
    return spec.multiply(x, spec.inverse(y)) in U


def is_spaced(S, U) -> bool:
    """No two distinct ``g, h`` in ``S`` with ``h in U g``."""
    spec = _spec_of(S, U) if hasattr(U, "spec") else _spec_of(S)
    members = S.as_set() if isinstance(S, FiniteSubset) else frozenset(S)
    if _small(U):
        mul = spec.multiply
        shape = list(U)
        for g in members:
            for u in shape:
                h = mul(u, g)
                if h != g and h in members:
                    return False
        return True
    elems = list(members)
    for i, g in enumerate(elems):
        for h in elems[i + 1 :]:
            if _in_translate(spec, U, h, g) or _in_translate(spec, U, g, h):
                return False
    return True


def product_set(spec: GroupSpec, U, S) -> set:
    mul = spec.multiply
    return {mul(u, s) for u in U for s in S}


def is_syndetic_on_window(S, U, window: Window, margin: int) -> bool:
    """``U S`` covers the window shrunk by ``margin``."""
    inner = window.shrink(margin)
    if inner.is_empty():
        raise ValueError("inner window is empty")
    covered = product_set(window.spec, U, S)
    return all(w in covered for w in inner)


def are_apart(S, T, U) -> bool:
    """``U S`` misses ``T`` and ``S`` misses ``U T``."""
    if not S or not T:
        return True
    spec = _spec_of(S, T)
    if _small(U):
        T_set = T.as_set() if isinstance(T, FiniteSubset) else set(T)
        S_set = S.as_set() if isinstance(S, FiniteSubset) else set(S)
        mul = spec.multiply
        shape = list(U)
        for u in shape:
            for s in S_set:
                if mul(u, s) in T_set:
                    return False
            for t in T_set:
                if mul(u, t) in S_set:
                    return False
        return True
    for s in S:
        for t in T:
            if _in_translate(spec, U, t, s) or _in_translate(spec, U, s, t):
                return False
    return True


class _Blocker:
    """Incremental spacedness test for greedy constructions."""

    def __init__(self, spec: GroupSpec, U):
        self.spec = spec
        self.U = U
        self.expand = _small(U)
        if self.expand:
            shape = set(U)
            self.shape = list(shape | {spec.inverse(u) for u in shape})
        self.blocked: set = set()
        self.members: list = []
        self.member_set: set = set()

    def can_add(self, w) -> bool:
        if w in self.member_set:
            return False
        if self.expand:
            return w not in self.blocked
        spec, U = self.spec, self.U
        return not any(
            _in_translate(spec, U, w, s) or _in_translate(spec, U, s, w) for s in self.members
        )

    def add(self, s):
        self.members.append(s)
        self.member_set.add(s)
        if self.expand:
            mul = self.spec.multiply
            self.blocked.update(mul(u, s) for u in self.shape)


def greedy_maximal_spaced(U, window, seed=(), order: Iterable | None = None) -> FiniteSubset:
    """Extend ``seed`` to a ``U``-spaced set that is maximal inside ``window``.

    Candidates are scanned in ShortLex order unless ``order`` is given.
    """
    spec = window.spec
    seed = as_subset(spec, seed)
    if not is_spaced(seed, U):
        raise InvalidSeedError("seed is not spaced")
    if any(g not in window for g in seed):
        raise InvalidSeedError("seed leaves the window")
    blocker = _Blocker(spec, U)
    for s in seed:
        blocker.add(s)
    for w in window if order is None else order:
        if blocker.can_add(w):
            blocker.add(w)
    return FiniteSubset(spec, blocker.members, window)


def is_window_maximal(S, U, window) -> bool:
    """Every window point outside ``S`` breaks spacedness when added (brute force)."""
    spec = window.spec
    members = set(S)
    for w in window:
        if w in members:
            continue
        if all(
            not _in_translate(spec, U, w, s) and not _in_translate(spec, U, s, w) for s in members
        ):
            return False
    return True


# -- UFOs ----------------------------------------------------------------------


@dataclass
class UfoSearchReport:
    verdict: str  # "CounterexampleFound" or "NoneFoundWithinBudget"
    trials_used: int
    counterexample: FiniteSubset | None = None
    missed_coset: object = None
    notes: dict = field(default_factory=dict)

    @property
    def found(self) -> bool:
        return self.verdict == "CounterexampleFound"


def ufo_falsify(V, delta, window, budget: int, seed: int) -> UfoSearchReport:
    """Search for a maximal ``V``-spaced set missing a right coset of ``delta``.

    Each trial scans the window in a random order with the points of one
    target coset pushed to the back, so they are only taken when nothing
    else blocks them. A set is reported only after re-checking it is
    spaced, window-maximal and disjoint from a coset that meets the inner
    window (points ``w`` with ``V w`` inside the window). Exhausting the
    budget proves nothing.
    """
    if budget < 1:
        raise ValueError("budget must be positive")
    spec = window.spec
    V = as_subset(spec, V).symmetrize()
    inner = window_inner(window, V)
    cosets: dict = {}
    for w in inner:
        cosets.setdefault(delta.coset_key(w), w)
    targets = list(cosets.items())
    if not targets:
        return UfoSearchReport("NoneFoundWithinBudget", 0, notes={"reason": "empty inner window"})
    points = list(window)
    by_coset: dict = {}
    for w in points:
        by_coset.setdefault(delta.coset_key(w), []).append(w)

    for trial in range(budget):
        rng = derive_rng(seed, trial)
        key, _ = targets[rng.randrange(len(targets))]
        rest = [w for w in points if delta.coset_key(w) != key]
        tail = list(by_coset[key])
        rng.shuffle(rest)
        rng.shuffle(tail)
        S = greedy_maximal_spaced(V, window, order=rest + tail)
        hit = {delta.coset_key(s) for s in S}
        for k, rep in targets:
            if k in hit:
                continue
            if not (is_spaced(S, V) and is_window_maximal(S, V, window)):
                raise AssertionError("greedy produced an invalid set")  # pragma: no cover
            if any(delta.coset_key(s) == k for s in S):
                continue  # pragma: no cover
            return UfoSearchReport("CounterexampleFound", trial + 1, S, rep)
    return UfoSearchReport("NoneFoundWithinBudget", budget)


def ufo_whisker_shape(disk_radius: int, whisker_len: int, spec: GroupSpec = Z2) -> FiniteSubset:
    """A Euclidean disk with a horizontal whisker of ``whisker_len`` points on each side."""
    if not isinstance(spec, Lattice) or spec.dim != 2:
        raise SpecMismatchError("the whisker shape lives in Z^2")
    if disk_radius < 1 or whisker_len < 0:
        raise ValueError("need disk_radius >= 1 and whisker_len >= 0")
    r2 = disk_radius * disk_radius
    pts = {
        (x, y)
        for x in range(-disk_radius, disk_radius + 1)
        for y in range(-disk_radius, disk_radius + 1)
        if x * x + y * y <= r2
    }
    for k in range(1, whisker_len + 1):
        pts.add((disk_radius + k, 0))
        pts.add((-disk_radius - k, 0))
    return FiniteSubset(spec, pts).symmetrize()


def conjugate_core(U, D) -> FiniteSubset:
    """The intersection of the conjugates ``u D u^-1`` over ``u`` in ``U``."""
    spec = _spec_of(U, D)
    mul, inv = spec.multiply, spec.inverse
    core = None
    for u in U:
        conj = {mul(mul(u, d), inv(u)) for d in D}
        core = conj if core is None else core & conj
    return FiniteSubset(spec, core or ())


def bounding_box(S) -> Box:
    """Smallest box containing a set of lattice points."""
    pts = list(S)
    dim = len(pts[0])
    return Box(Lattice(dim), [(min(p[i] for p in pts), max(p[i] for p in pts)) for i in range(dim)])
