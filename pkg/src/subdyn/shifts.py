"""Concrete shifts: proper colorings, the two-arrow shift on F2, products and lifts."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_array
from scipy.sparse.csgraph import maximum_flow

from .groups import (
    F2,
    Ball,
    FiniteSubset,
    FreeGroup,
    GroupSpec,
    Lattice,
    Product,
    ProductWindow,
    SpecMismatchError,
    UnsupportedOperationError,
    Window,
    as_subset,
    components,
    tree_hull,
)
from .patterns import (
    FullShift,
    Infeasible,
    InvalidFixedData,
    Pattern,
    PreconditionError,
    Shift,
    glue,
)
from .rng import derive_rng

# -- proper colorings ------------------------------------------------------------


class ColorShift(Shift):
    """Colorings by ``m`` colors in which every color class is ``D``-spaced."""

    def __init__(self, spec: GroupSpec, D, m: int):
        if m < 1:
            raise ValueError("need at least one color")
        self.spec = spec
        self.D = as_subset(spec, D)
        self.alphabet = m
        self.margin = self.D.radius()
        self._shape = spec.sorted(self.D.symmetrize().as_set() - {spec.identity})

    def conflict(self, p: Pattern):
        """First cell (ShortLex) sharing its color with a ``D``-neighbour, or ``None``."""
        mul = self.spec.multiply
        for g, v in p.items():
            if not 0 <= v < self.alphabet:
                return g
            for u in self._shape:
                if p.get(mul(u, g)) == v:
                    return g
        return None

    def is_valid(self, p: Pattern) -> bool:
        return self.conflict(p) is None

    def extend(self, p: Pattern, window, rng=None) -> Pattern:
        """Greedy completion in ShortLex order, a random free color per cell when ``rng`` is given."""
        bad = self.conflict(p)
        if bad is not None:
            raise Infeasible("invalid", bad, "pattern is not a proper coloring")
        mul = self.spec.multiply
        values = dict(p.values)
        cells = window.elements() if isinstance(window, Window) else self.spec.sorted(window)
        for w in cells:
            if w in values:
                continue
            taken = {values.get(mul(u, w)) for u in self._shape}
            free = [c for c in range(self.alphabet) if c not in taken]
            if not free:
                raise Infeasible("color-exhaustion", w, f"no color left at {self.spec.format(w)}")
            values[w] = free[rng.randrange(len(free))] if rng is not None else free[0]
        return Pattern(self.spec, values, self.alphabet)

    def to_json(self) -> dict:
        return {
            "kind": "color",
            "D": [self.spec.format(d) for d in self.D],
            "colors": self.alphabet,
        }

    def __repr__(self):
        return f"ColorShift({self.spec}, |D|={len(self.D)}, m={self.alphabet})"


def color_sample(D, m: int, window, seed: int, spec: GroupSpec | None = None) -> Pattern:
    spec = spec or window.spec
    return ColorShift(spec, D, m).extend(Pattern(spec, {}, m), window, rng=derive_rng(seed))


def find_g_fixed(shift: Shift, g, window, trials: int, seed: int, samples=()):
    """A sampled configuration ``x`` with ``(g.x)`` equal to ``x`` on the inner window, or ``None``.

    The inner window is the set of ``h`` with ``h g`` inside the window,
    where both sides are determined by ``x``.
    """
    spec = shift.spec
    if g == spec.identity:
        raise PreconditionError("g must not be the identity")
    members = window.elements() if isinstance(window, Window) else spec.sorted(window)
    member_set = set(members)
    mul = spec.multiply
    inner = [h for h in members if mul(h, g) in member_set]
    candidates = list(samples)
    for t in range(trials):
        candidates.append(shift.extend(shift.empty(), window, rng=derive_rng(seed, t)))
    for x in candidates:
        if all(x[mul(h, g)] == x[h] for h in inner):
            return x
    return None


def check_g_free(shift: Shift, g, window, trials: int, seed: int, samples=()) -> bool:
    """Sampling evidence that ``g`` fixes no configuration; ``False`` comes with a real fixed sample."""
    return find_g_fixed(shift, g, window, trials, seed, samples) is None


# -- the two-arrow shift on F2 ---------------------------------------------------

LETTERS = F2.gens  # ("a", "b", "A", "B")
_INDEX = {c: i for i, c in enumerate(LETTERS)}


def encode_pair(pair) -> int:
    return 4 * _INDEX[pair[0]] + _INDEX[pair[1]]


def decode_symbol(v: int) -> tuple[str, str]:
    return LETTERS[v // 4], LETTERS[v % 4]


class ArrowAssignment:
    """Cells of F2 mapped to an ordered pair of generator letters.

    Cell ``g`` with pair ``(s, t)`` sends its arrows to ``s g`` and ``t g``.
    """

    __slots__ = ("arrows",)

    def __init__(self, arrows=None):
        self.arrows: dict = dict(arrows or {})

    def __len__(self):
        return len(self.arrows)

    def __contains__(self, g):
        return g in self.arrows

    def __getitem__(self, g):
        return self.arrows[g]

    def __eq__(self, other):
        return isinstance(other, ArrowAssignment) and self.arrows == other.arrows

    def __repr__(self):
        shown = ", ".join(f"{F2.format(g)}:{p[0]}{p[1]}" for g, p in self.items()[:6])
        return f"ArrowAssignment({{{shown}{', ...' if len(self) > 6 else ''}}})"

    @property
    def domain(self) -> FiniteSubset:
        return FiniteSubset(F2, self.arrows)

    def items(self) -> list:
        return [(g, self.arrows[g]) for g in F2.sorted(self.arrows)]

    def targets(self, g) -> tuple[str, str]:
        s, t = self.arrows[g]
        return F2.multiply(s, g), F2.multiply(t, g)

    def all_targets(self) -> list:
        return [t for g in self.arrows for t in self.targets(g)]

    def restrict(self, S) -> "ArrowAssignment":
        return ArrowAssignment({g: self.arrows[g] for g in S if g in self.arrows})

    def union(self, other: "ArrowAssignment") -> "ArrowAssignment":
        merged = dict(self.arrows)
        for g, pair in other.arrows.items():
            if merged.setdefault(g, pair) != pair:
                raise Infeasible("overlap", g, f"two arrow pairs at {F2.format(g)}")
        return ArrowAssignment(merged)

    def to_pattern(self) -> Pattern:
        return Pattern(F2, {g: encode_pair(p) for g, p in self.arrows.items()}, 16)

    @classmethod
    def from_pattern(cls, p: Pattern) -> "ArrowAssignment":
        return cls({g: decode_symbol(v) for g, v in p.values.items()})

    @classmethod
    def from_targets(cls, cell, t0, t1) -> tuple:
        """The letter pair sending ``cell`` to ``t0`` and ``t1``."""
        inv = F2.inverse(cell)
        return F2.multiply(t0, inv), F2.multiply(t1, inv)


def pdox_conflict(x: ArrowAssignment):
    """First vertex hit twice (or a cell with a repeated or non-generator letter), else ``None``."""
    seen: set = set()
    for g, (s, t) in x.items():
        if s not in _INDEX or t not in _INDEX or s == t:
            return g
        for target in x.targets(g):
            if target in seen:
                return target
            seen.add(target)
    return None


def pdox_validate(x: ArrowAssignment) -> bool:
    return pdox_conflict(x) is None


def pdox_hall_check(region, matched) -> bool:
    """``|A region \\ matched| >= 2 |region|`` with ``A region`` the literal product set."""
    region = list(region)
    neigh = {t for g in region for t in F2.neighbors(g)}
    return len(neigh - set(matched)) >= 2 * len(region)


def _region_of(window) -> set:
    cells = set(window.elements()) if isinstance(window, Window) else set(window)
    if isinstance(window, Ball) or len(components(F2, cells)) <= 1:
        return cells
    return tree_hull(F2, cells)


def pdox_extend(fixed: ArrowAssignment, window, rng=None) -> ArrowAssignment:
    """Complete ``fixed`` to every cell of the window, or raise ``Infeasible`` with a Hall witness.

    Each free cell must send two arrows to distinct neighbours that no
    other arrow hits. This is a max-flow problem: source to cell with
    capacity 2, cell to each neighbour with capacity 1, neighbour to sink
    with capacity 1 unless a fixed arrow already uses it. A disconnected
    window is replaced by its tree hull first. On a connected region a
    window solution always continues to the whole tree, because each
    outside vertex has three neighbours farther from the region and can
    route both arrows outward; so the verdict holds for the infinite shift.
    """
    bad = pdox_conflict(fixed)
    if bad is not None:
        raise InvalidFixedData(bad, f"fixed arrows are invalid at {F2.format(bad)}")
    region = _region_of(window)
    outside = [g for g in fixed.arrows if g not in region]
    if outside:
        raise PreconditionError(f"fixed cell {F2.format(outside[0])} lies outside the window")
    free = F2.sorted(g for g in region if g not in fixed)
    if not free:
        return ArrowAssignment(fixed.arrows)
    matched = set(fixed.all_targets())
    order = list(free)
    target_list = F2.sorted({t for g in free for t in F2.neighbors(g) if t not in matched})
    if rng is not None:
        rng.shuffle(order)
        rng.shuffle(target_list)
    nf, nt = len(order), len(target_list)
    cell_id = {g: 1 + i for i, g in enumerate(order)}
    target_id = {t: 1 + nf + j for j, t in enumerate(target_list)}
    sink = 1 + nf + nt
    rows, cols, caps = [], [], []
    for g in order:
        rows.append(0)
        cols.append(cell_id[g])
        caps.append(2)
        for t in F2.neighbors(g):
            if t in target_id:
                rows.append(cell_id[g])
                cols.append(target_id[t])
                caps.append(1)
    for t in target_list:
        rows.append(target_id[t])
        cols.append(sink)
        caps.append(1)
    size = sink + 1
    graph = csr_array((np.array(caps, dtype=np.int32), (rows, cols)), shape=(size, size))
    result = maximum_flow(graph, 0, sink, method="dinic")
    flow = result.flow.tocsr()

    chosen: dict = {g: [] for g in order}
    for g in order:
        i = cell_id[g]
        start, end = flow.indptr[i], flow.indptr[i + 1]
        for j, f in zip(flow.indices[start:end], flow.data[start:end]):
            if f > 0 and 1 + nf <= j < sink:
                chosen[g].append(target_list[j - 1 - nf])
    if result.flow_value < 2 * nf:
        raise Infeasible("hall", _hall_witness(order, chosen, target_id), "no 2-to-1 matching")

    arrows = dict(fixed.arrows)
    for g in order:
        t0, t1 = F2.sorted(chosen[g])
        if rng is not None and rng.random() < 0.5:
            t0, t1 = t1, t0
        arrows[g] = ArrowAssignment.from_targets(g, t0, t1)
    return ArrowAssignment(arrows)


def _hall_witness(order, chosen, target_id) -> FiniteSubset:
    """Cells reachable in the residual graph from an unsaturated cell.

    Every neighbour of such a cell is either fixed-matched or owned by
    another reachable cell, so the set violates the Hall count.
    """
    owner = {t: g for g in order for t in chosen[g]}
    start = [g for g in order if len(chosen[g]) < 2]
    seen = set(start)
    queue = deque(start)
    while queue:
        g = queue.popleft()
        for t in F2.neighbors(g):
            if t not in target_id or t in chosen[g]:
                continue
            h = owner.get(t)
            if h is not None and h not in seen:
                seen.add(h)
                queue.append(h)
    return FiniteSubset(F2, seen)


def pdox_feasible(fixed: ArrowAssignment, window) -> bool:
    try:
        pdox_extend(fixed, window)
    except Infeasible:
        return False
    return True


class PdoxShift(Shift):
    """Two-arrow configurations on F2 as a 16-symbol shift (symbol ``4 i + j``)."""

    def __init__(self):
        self.spec = F2
        self.alphabet = 16
        self.margin = 1

    def is_valid(self, p: Pattern) -> bool:
        return pdox_validate(ArrowAssignment.from_pattern(p))

    def extend(self, p: Pattern, window, rng=None) -> Pattern:
        x = ArrowAssignment.from_pattern(p)
        if not pdox_validate(x):
            raise Infeasible("invalid", pdox_conflict(x), "arrow targets collide")
        return pdox_extend(x, window, rng).to_pattern()

    def to_json(self) -> dict:
        return {"kind": "pdox"}

    def __repr__(self):
        return "PdoxShift()"


# -- forcing ---------------------------------------------------------------------


@dataclass
class ForcingState:
    fixed: ArrowAssignment
    deduced: ArrowAssignment
    blocked: frozenset
    status: str  # "Consistent" or "Contradiction"
    contradiction: object = None
    order: list = field(default_factory=list)

    @property
    def consistent(self) -> bool:
        return self.status == "Consistent"


def pdox_propagate(fixed: ArrowAssignment, window) -> ForcingState:
    """Deduce arrows forced by the fixed ones, to a fixed point.

    Rules: a vertex hit by an arrow is unavailable to every other arrow;
    a cell with exactly two available neighbours sends its arrows there.
    Sound, not complete.
    """
    blocked: set = set()
    for g, _ in fixed.items():
        for t in fixed.targets(g):
            if t in blocked:
                return ForcingState(fixed, ArrowAssignment(), frozenset(blocked), "Contradiction", t)
            blocked.add(t)
    cells = window.elements() if isinstance(window, Window) else F2.sorted(window)
    cell_set = set(cells)
    deduced: dict = {}
    order = []
    queue = deque(g for g in cells if g not in fixed)
    queued = set(queue)
    while queue:
        g = queue.popleft()
        queued.discard(g)
        if g in deduced:
            continue
        avail = [t for t in F2.neighbors(g) if t not in blocked]
        if len(avail) < 2:
            return ForcingState(
                fixed, ArrowAssignment(deduced), frozenset(blocked), "Contradiction", g, order
            )
        if len(avail) > 2:
            continue
        t0, t1 = F2.sorted(avail)
        deduced[g] = ArrowAssignment.from_targets(g, t0, t1)
        order.append(g)
        for t in (t0, t1):
            blocked.add(t)
            for h in F2.neighbors(t):
                if h in cell_set and h not in fixed and h not in deduced and h not in queued:
                    queue.append(h)
                    queued.add(h)
    return ForcingState(fixed, ArrowAssignment(deduced), frozenset(blocked), "Consistent", None, order)


# -- the gadget witness ----------------------------------------------------------


@dataclass
class Gadget:
    root_u: str
    root_v: str
    level: int
    u: dict  # address (tuple of 0/1) -> vertex
    v: dict
    arrows: ArrowAssignment  # fixed pairs at the leaves

    @property
    def leaves(self) -> FiniteSubset:
        return self.arrows.domain


def _farther(g, center) -> list:
    d = F2.distance(g, center)
    return F2.sorted(h for h in F2.neighbors(g) if F2.distance(h, center) > d)


def build_gadget(center, v_root, k: int) -> Gadget:
    """A depth-``k`` forcing gadget below ``v_root``, pointing back at ``center``.

    Each internal ``v_s`` has two children ``u_s0, u_s1`` (its two least
    farther neighbours) and ``v_si`` is the least farther neighbour of
    ``u_si``. Every leaf sends its arrows to its own ``u`` and to its least
    farther neighbour, which blocks both children of its parent; the parent
    is then forced back towards its ``u``, and so on up to ``center``.
    """
    u = {(): center}
    v = {(): v_root}
    frontier = [()]
    for _ in range(k):
        nxt = []
        for s in frontier:
            kids = _farther(v[s], center)[:2]
            for i, child in enumerate(kids):
                u[s + (i,)] = child
                v[s + (i,)] = _farther(child, center)[0]
                nxt.append(s + (i,))
        frontier = nxt
    arrows = {}
    for s in frontier:
        leaf = v[s]
        arrows[leaf] = ArrowAssignment.from_targets(leaf, u[s], _farther(leaf, center)[0])
    return Gadget(center, v_root, k, u, v, ArrowAssignment(arrows))


@dataclass
class PdoxWitness:
    n: int
    k: int
    S0: FiniteSubset
    x0: ArrowAssignment
    S1: FiniteSubset
    x1: ArrowAssignment
    gadgets: tuple
    window: Ball
    infeasible: Infeasible


def gadget_level(n: int) -> int:
    if n < 1:
        raise ValueError("n must be positive")
    k = 1
    while 4 * k + 1 < n:
        k += 1
    return k


def pdox_non_irreducible_witness(n: int) -> PdoxWitness:
    """Two patterns on ``D_n``-apart sets that each extend but cannot be glued."""
    k = gadget_level(n)
    center = ""
    nbrs = F2.neighbors(center)
    v0, v1 = F2.sorted(nbrs)[:2]
    g0, g1 = build_gadget(center, v0, k), build_gadget(center, v1, k)
    window = Ball(F2, 2 * k + 2)
    for g in (g0, g1):
        pdox_extend(g.arrows, window)  # raises if a gadget alone is infeasible
    d = min(F2.distance(s, t) for s in g0.leaves for t in g1.leaves)
    if d <= n:
        raise AssertionError(f"gadgets at distance {d} are not D_{n}-apart")  # pragma: no cover
    try:
        pdox_extend(g0.arrows.union(g1.arrows), window)
    except Infeasible as exc:
        verdict = exc
    else:  # pragma: no cover
        raise AssertionError("gadgets unexpectedly glue")
    return PdoxWitness(n, k, g0.leaves, g0.arrows, g1.leaves, g1.arrows, (g0, g1), window, verdict)


# -- products and lifts ----------------------------------------------------------


class ProductShift(Shift):
    """``X x Y`` on one group, with symbol ``i * |Y| + j``."""

    def __init__(self, left: Shift, right: Shift):
        if left.spec != right.spec:
            raise SpecMismatchError("factors must live on the same group")
        self.spec = left.spec
        self.left, self.right = left, right
        self.alphabet = left.alphabet * right.alphabet
        self.margin = max(left.margin, right.margin)

    def split(self, p: Pattern) -> tuple[Pattern, Pattern]:
        k = self.right.alphabet
        lv = {g: v // k for g, v in p.values.items()}
        rv = {g: v % k for g, v in p.values.items()}
        return Pattern(self.spec, lv, self.left.alphabet), Pattern(self.spec, rv, k)

    def combine(self, lp: Pattern, rp: Pattern) -> Pattern:
        k = self.right.alphabet
        return Pattern(self.spec, {g: lp[g] * k + rp[g] for g in lp.values}, self.alphabet)

    def is_valid(self, p: Pattern) -> bool:
        lp, rp = self.split(p)
        return self.left.is_valid(lp) and self.right.is_valid(rp)

    def extend(self, p: Pattern, window, rng=None) -> Pattern:
        lp, rp = self.split(p)
        return self.combine(self.left.extend(lp, window, rng), self.right.extend(rp, window, rng))

    def to_json(self) -> dict:
        return {"kind": "product", "left": self.left.to_json(), "right": self.right.to_json()}


class GLift(Shift):
    """An F2-shift copied independently onto every F2-coset of ``G x F2``."""

    def __init__(self, inner: Shift, g_factor: GroupSpec):
        if not isinstance(inner.spec, FreeGroup):
            raise SpecMismatchError("the lifted shift must live on a free group")
        if not isinstance(g_factor, (Lattice, FreeGroup, Product)):
            raise UnsupportedOperationError(f"unsupported factor {g_factor}")
        self.inner = inner
        self.spec = Product(g_factor, inner.spec)
        self.alphabet = inner.alphabet
        self.margin = inner.margin

    def slices(self, p: Pattern) -> dict:
        out: dict = {}
        for (g, s), v in p.values.items():
            out.setdefault(g, {})[s] = v
        return {g: Pattern(self.inner.spec, vals, self.alphabet) for g, vals in out.items()}

    def is_valid(self, p: Pattern) -> bool:
        return all(self.inner.is_valid(sl) for sl in self.slices(p).values())

    def _slice_windows(self, window) -> dict:
        if isinstance(window, ProductWindow):
            return {g: window.right for g in window.left}
        out: dict = {}
        for g, s in window:
            out.setdefault(g, []).append(s)
        return out

    def extend(self, p: Pattern, window, rng=None) -> Pattern:
        wins = self._slice_windows(window)
        slices = self.slices(p)
        stray = [g for g in slices if g not in wins]
        if stray:
            raise PreconditionError(f"pattern meets coset {self.spec.left.format(stray[0])} outside the window")
        values = {}
        for g in self.spec.left.sorted(wins):
            sl = slices.get(g, self.inner.empty())
            try:
                filled = self.inner.extend(sl, wins[g], rng)
            except Infeasible as exc:
                witness = exc.witness
                if isinstance(witness, FiniteSubset):
                    witness = FiniteSubset(self.spec, [(g, s) for s in witness])
                elif witness is not None:
                    witness = (g, witness)
                raise Infeasible(exc.reason, witness, f"coset {self.spec.left.format(g)}") from exc
            values.update({(g, s): v for s, v in filled.values.items()})
        return Pattern(self.spec, values, self.alphabet)

    def to_json(self) -> dict:
        return {"kind": "lift", "inner": self.inner.to_json(), "group": self.spec.left.to_json()}

    def __repr__(self):
        return f"GLift({self.inner!r}, {self.spec.left})"


def lift_to_product(inner: Shift, g_factor: GroupSpec) -> Shift:
    if isinstance(inner, FullShift):
        return FullShift(Product(g_factor, inner.spec), inner.alphabet)
    return GLift(inner, g_factor)


def pdox_glue(pieces, window) -> ArrowAssignment:
    """Glue arrow assignments through the generic engine."""
    shift = PdoxShift()
    return ArrowAssignment.from_pattern(glue(shift, [x.to_pattern() for x in pieces], window))
