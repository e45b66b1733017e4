"""Minimal subshifts by pinning a pattern along a maximal spaced set.

Two regimes are covered. Over a general group the recipe picks a spaced
set ``Q`` of anchors, a pattern ``alpha`` on ``U`` showing every
``E``-pattern at some anchor, and pins ``alpha`` at every point of a
maximal ``V``-spaced set. Over ``G x F2`` the coset-wise augmentation
below turns pieces of a gluing problem into connected-enough pieces the
ambient shift can glue.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .groups import (
    Ball,
    Box,
    FiniteSubset,
    FreeGroup,
    GroupSpec,
    Lattice,
    Product,
    ProductWindow,
    Subgroup,
    Window,
    as_subset,
    components,
    geodesic,
    set_product,
    window_inner,
)
from .patterns import (
    Infeasible,
    Pattern,
    PreconditionError,
    Shift,
    b_class_check,
    coset_slices,
    glue,
    pattern_set,
    sorted_patterns,
    translate_pattern,
)
from .rng import derive_rng
from .spaced import _Blocker, greedy_maximal_spaced


class InsufficientWindowError(ValueError):
    pass


# -- recipe ------------------------------------------------------------------------


@dataclass
class MinimalityRecipe:
    shift: Shift
    E: FiniteSubset
    D: object
    U: object
    V: object
    Q: FiniteSubset
    alpha: Pattern
    delta: Subgroup
    mode: str = "UDU"  # or "UD2U"
    r: int | None = None
    n: int | None = None

    @property
    def N(self) -> int | None:
        if self.r is None or self.n is None:
            return None
        return 4 * self.r + 3 * self.n


def _sym_interval(values) -> tuple[int, int]:
    m = max(abs(v) for v in values)
    return -m, m


def choose_q(E, D, delta: Subgroup, target_size: int, window, min_radius: int = 0):
    """Greedily pick ``target_size`` points of ``delta`` that are ``EDE``-spaced.

    Returns ``(Q, U)`` where ``U`` contains ``Q`` and ``E Q``. Over a
    lattice ``U`` is the bounding box; over ``G x F2`` it is a symmetric
    box times an F2-ball (of radius at least ``min_radius``); otherwise it
    is ``Q`` together with ``E Q``.
    """
    if target_size < 1:
        raise ValueError("target_size must be positive")
    spec = window.spec
    E = as_subset(spec, E) if not isinstance(E, Window) else E
    EDE = set_product(spec, set_product(spec, E, D), E)
    blocker = _Blocker(spec, EDE)
    Q = []
    for g in delta.elements_in(window):
        if blocker.can_add(g):
            blocker.add(g)
            Q.append(g)
            if len(Q) == target_size:
                break
    if len(Q) < target_size:
        raise InsufficientWindowError(
            f"window holds only {len(Q)} of {target_size} spaced points of the subgroup; enlarge it"
        )
    Q = FiniteSubset(spec, Q)
    EQ = set_product(spec, E, Q)
    pts = set(EQ) | set(Q)
    if isinstance(spec, Lattice):
        bounds = [(min(p[i] for p in pts), max(p[i] for p in pts)) for i in range(spec.dim)]
        U = Box(spec, bounds).subset()
    elif isinstance(spec, Product) and isinstance(spec.left, Lattice) and isinstance(spec.right, FreeGroup):
        left = spec.left
        bounds = [_sym_interval(p[0][i] for p in pts) for i in range(left.dim)]
        r = max(min_radius, max(spec.right.length(p[1]) for p in pts))
        U = ProductWindow(spec, Box(left, bounds), Ball(spec.right, r))
    else:
        U = FiniteSubset(spec, pts)
    return Q, U


def synth_alpha(shift: Shift, U, Q, E, window=None) -> Pattern:
    """A pattern on ``U`` whose ``E``-view from the ``i``-th anchor is the ``i``-th ``E``-pattern.

    Anchors and ``E``-patterns are both taken in ShortLex order.
    """
    spec = shift.spec
    patterns = sorted_patterns(pattern_set(shift, E))
    anchors = spec.sorted(Q)
    if len(patterns) != len(anchors):
        raise PreconditionError(f"{len(anchors)} anchors for {len(patterns)} E-patterns")
    pieces = [translate_pattern(spec.inverse(q), p) for q, p in zip(anchors, patterns)]
    full = glue(shift, pieces, window if window is not None else U)
    return full.restrict(U)


def make_recipe(
    shift: Shift,
    E,
    D,
    delta: Subgroup,
    window,
    mode: str = "UDU",
    min_radius: int = 0,
    n: int | None = None,
) -> MinimalityRecipe:
    spec = shift.spec
    E = as_subset(spec, E)
    count = len(pattern_set(shift, E))
    Q, U = choose_q(E, D, delta, count, window, min_radius)
    alpha = synth_alpha(shift, U, Q, E)
    V = set_product(spec, set_product(spec, U, D), U)
    if mode == "UD2U":
        V = set_product(spec, set_product(spec, set_product(spec, U, D), D), U)
    elif mode != "UDU":
        raise ValueError(f"unknown mode {mode!r}")
    if isinstance(V, FiniteSubset):
        V = V.symmetrize()
    r = U.right.radius if isinstance(U, ProductWindow) else None
    return MinimalityRecipe(shift, E, D, U, V, Q, alpha, delta, mode, r, n)


def pin_alpha(alpha: Pattern, g) -> Pattern:
    """``alpha`` copied onto ``U g`` so that ``(g . y)|_U = alpha``."""
    return translate_pattern(alpha.spec.inverse(g), alpha)


def build_y_window(recipe: MinimalityRecipe, window, seed: int):
    """A window configuration of the minimal subshift and its anchor set ``T``.

    ``T`` is a seeded random maximal ``V``-spaced set among the points
    ``g`` with ``U g`` inside the window; ``alpha`` is pinned at each of
    them and the remaining cells are filled by the ambient shift.
    """
    spec = recipe.shift.spec
    inner = window_inner(window, recipe.U)
    if not inner:
        raise InsufficientWindowError("no translate of U fits in the window")
    rng = derive_rng(seed)
    order = list(inner)
    rng.shuffle(order)
    T = greedy_maximal_spaced(recipe.V, inner, order=order)
    pieces = [pin_alpha(recipe.alpha, t) for t in T]
    try:
        y = glue(recipe.shift, pieces, window, rng=derive_rng(seed, 1))
    except Infeasible as exc:
        raise AssertionError(f"pinned copies of alpha failed to glue: {exc}") from exc
    return y, FiniteSubset(spec, T, window)


def occurs_at(y: Pattern, g, E_sorted, spec: GroupSpec) -> tuple | None:
    """``(g . y)|_E`` as a tuple over ``E_sorted``, or ``None`` if ``E g`` leaves ``y``."""
    mul = spec.multiply
    out = []
    for h in E_sorted:
        v = y.get(mul(h, g))
        if v is None:
            return None
        out.append(v)
    return tuple(out)


def minimality_gaps(
    y_family,
    delta: Subgroup,
    E,
    ref_patterns,
    window,
    syndetic_radius: int | None = None,
    margin: int = 0,
):
    """Failures of the minimality certificate as ``(index, pattern, center)`` triples.

    Without ``syndetic_radius`` a failure means the pattern never shows up
    along ``delta`` in the window (``center`` is ``None``). With it, every
    ``delta``-point of the window shrunk by ``margin`` must see every
    pattern within that radius.
    """
    spec = window.spec
    E_sorted = spec.sorted(E)
    mul = spec.multiply
    anchors = [
        g for g in delta.elements_in(window) if all(mul(h, g) in window for h in E_sorted)
    ]
    if not anchors:
        raise InsufficientWindowError("no translate of E along the subgroup fits in the window")
    refs = sorted_patterns(ref_patterns)
    ref_keys = [tuple(p[h] for h in E_sorted) for p in refs]
    centers = None
    if syndetic_radius is not None:
        inner = window.shrink(margin) if isinstance(window, Window) else window
        centers = list(delta.elements_in(inner))
    gaps = []
    for idx, y in enumerate(y_family):
        seen: dict = {}
        for g in anchors:
            key = occurs_at(y, g, E_sorted, spec)
            if key is not None:
                seen.setdefault(key, []).append(g)
        for p, key in zip(refs, ref_keys):
            where = seen.get(key)
            if not where:
                gaps.append((idx, p, None))
                continue
            if centers is None:
                continue
            for c in centers:
                if all(spec.distance(a, c) > syndetic_radius for a in where):
                    gaps.append((idx, p, c))
                    break
    return gaps


def check_delta_e_minimal(y_family, delta, E, ref_patterns, window, syndetic_radius=None, margin=0) -> bool:
    return not minimality_gaps(y_family, delta, E, ref_patterns, window, syndetic_radius, margin)


# -- coset-wise augmentation over G x F2 ----------------------------------------


@dataclass(frozen=True)
class ProductShape:
    """``U = U0 x D_r`` and ``D = D0 x D_{2n}`` inside ``G x F2``."""

    spec: Product
    U0: tuple
    r: int
    D0: tuple
    n: int

    @property
    def free(self) -> FreeGroup:
        return self.spec.right

    @property
    def d_radius(self) -> int:
        return 2 * self.n

    @property
    def N(self) -> int:
        return 4 * self.r + 3 * self.n

    def U_at(self, g) -> set:
        """The explicit set ``U g``."""
        G, F = self.spec.left, self.free
        ball = F.ball(self.r)
        return {(G.multiply(u, g[0]), F.multiply(d, g[1])) for u in self.U0 for d in ball}

    def U_cosets(self, g) -> list:
        G = self.spec.left
        return [G.multiply(u, g[0]) for u in self.U0]

    def UB(self, B) -> set:
        out: set = set()
        for g in B:
            out |= self.U_at(g)
        return out


def close_pair(spec: FreeGroup, A, B):
    """A pair ``(a, b)`` realising the distance between two finite sets."""
    return min(((a, b) for a in A for b in B), key=lambda ab: (spec.distance(*ab), spec.sort_key(ab[0]), spec.sort_key(ab[1])))


def augment_ji(S, B, shape: ProductShape) -> FiniteSubset:
    """``S`` together with ``U B`` and the joining segments.

    For every ``g`` in ``B`` and every F2-coset ``C`` meeting ``U g``, a
    component of ``S`` in ``C`` that misses ``U g`` but comes within ``n``
    of it is joined to ``U g`` by the tree geodesic between their closest
    points.
    """
    spec, F = shape.spec, shape.free
    slices = coset_slices(spec, S)
    comps = {c: components(F, pts) for c, pts in slices.items()}
    J = set(S) | shape.UB(B)
    for g in B:
        center = g[1]
        for c in shape.U_cosets(g):
            near = []
            for theta in comps.get(c, ()):
                x = min(theta, key=lambda t: (F.distance(t, center), F.sort_key(t)))
                d = F.distance(x, center)
                if shape.r < d <= shape.r + shape.n:
                    near.append((theta, x, d))
            if len(near) > 1:
                a, b = near[0][0], near[1][0]
                raise PreconditionError(
                    f"coset {spec.left.format(c)}: components at {F.format(a.elements[0])} and "
                    f"{F.format(b.elements[0])} are both close to U{spec.format(g)}"
                )
            for _, x, d in near:
                path = geodesic(F, x, center)[: d - shape.r + 1]
                J.update((c, p) for p in path)
    return FiniteSubset(spec, J)


def apart_witness(A, B, D0, radius: int, spec: Product):
    """A pair ``(a, b)`` with ``b in (D0 x D_radius) a``, or ``None`` when the sets are apart.

    ``D0`` must be symmetric, which makes the relation symmetric.
    """
    G, F = spec.left, spec.right
    sa, sb = coset_slices(spec, A), coset_slices(spec, B)
    for c in G.sorted(sa):
        for d0 in D0:
            c2 = G.multiply(d0, c)
            if c2 not in sb:
                continue
            for a in F.sorted(sa[c]):
                for b in sb[c2]:
                    if F.distance(a, b) <= radius:
                        return (c, a), (c2, b)
    return None


def _component_of(F: FreeGroup, comps, x):
    for comp in comps:
        if x in comp:
            return comp
    raise KeyError(x)  # pragma: no cover


@dataclass
class ClaimResult:
    claim: str
    verdict: bool
    witness: object = None


@dataclass
class ClaimsReport:
    J: list
    results: list = field(default_factory=list)

    def verdict(self, claim: str) -> bool:
        return all(r.verdict for r in self.results if r.claim == claim)

    @property
    def ok(self) -> bool:
        return all(r.verdict for r in self.results)

    def failures(self) -> list:
        return [r for r in self.results if not r.verdict]


CLAIMS = ("containment", "stays_local", "tree_class", "pieces_apart", "anchors_apart")


def verify_ji_claims(S_list, B_list, B_extra, shape: ProductShape) -> ClaimsReport:
    """Build every ``J_i`` and check what gluing through them relies on.

    ``containment``: ``J_i`` lies in ``D_{n-1} S_i`` together with ``U B_i``.
    ``stays_local``: distinct components of ``S_i`` stay in distinct
    components of ``J_i``, each within ``2r + n`` of its source.
    ``tree_class``: ``J_i`` is coset-wise in ``B_n``.
    ``pieces_apart``: ``J_i`` and ``J_j`` are ``D``-apart.
    ``anchors_apart``: ``U g`` and every ``J_i`` are ``D``-apart for each extra anchor ``g``.
    """
    spec, F, n, r = shape.spec, shape.free, shape.n, shape.r
    J_list = [augment_ji(S, B, shape) for S, B in zip(S_list, B_list)]
    report = ClaimsReport(J_list)
    add = report.results.append

    for i, (S, B, J) in enumerate(zip(S_list, B_list, J_list)):
        # J_i lies in D_{n-1} S_i together with U B_i.
        UB = shape.UB(B)
        s_slices = coset_slices(spec, S)
        stray = None
        for c, x in J:
            if (c, x) in UB:
                continue
            if not any(F.distance(x, s) <= n - 1 for s in s_slices.get(c, ())):
                stray = (c, x)
                break
        add(ClaimResult("containment", stray is None, stray and {"piece": i, "cell": stray}))

        # Each S-component grows into its own J-component, within 2r+n of it.
        j_slices = coset_slices(spec, J)
        bad = None
        for c in spec.left.sorted(s_slices):
            j_comps = components(F, j_slices[c])
            owner = {}
            for y0 in components(F, s_slices[c]):
                comp = _component_of(F, j_comps, y0.elements[0])
                far = [y for y in comp if all(F.distance(y, t) > 2 * r + n for t in y0)]
                if far:
                    bad = {"piece": i, "coset": c, "cell": far[0]}
                    break
                if comp in owner:
                    bad = {"piece": i, "coset": c, "merged": (owner[comp], y0.elements[0])}
                    break
                owner[comp] = y0.elements[0]
            if bad:
                break
        add(ClaimResult("stays_local", bad is None, bad))

        # J_i is coset-wise in B_n.
        bad = None
        for c in spec.left.sorted(j_slices):
            if not b_class_check(j_slices[c], n, F):
                bad = {"piece": i, "coset": c}
                break
        add(ClaimResult("tree_class", bad is None, bad))

    for i, j in itertools.combinations(range(len(J_list)), 2):
        w = apart_witness(J_list[i], J_list[j], shape.D0, shape.d_radius, spec)
        add(ClaimResult("pieces_apart", w is None, w and {"pieces": (i, j), "pair": w}))

    for g in B_extra:
        Ug = shape.U_at(g)
        for i, J in enumerate(J_list):
            w = apart_witness(Ug, J, shape.D0, shape.d_radius, spec)
            add(ClaimResult("anchors_apart", w is None, w and {"g": g, "piece": i, "pair": w}))
    return report


# -- random conforming instances -------------------------------------------------


@dataclass
class ClaimsInstance:
    shape: ProductShape
    S_list: list
    B_list: list
    B_extra: list
    v0: int  # V = [-v0, v0] x D_vr
    vr: int
    w0: int  # W = DUVUD = [-w0, w0] x D_wr
    wr: int


def shape_radii(shape: ProductShape, mode: str = "UD2U") -> tuple[int, int, int, int]:
    """``(v0, vr, w0, wr)`` for ``V = U D^k U`` (``k`` = 2 or 1) and ``W = D U V U D``."""
    u = max(abs(x[0]) for x in shape.U0)
    d = max(abs(x[0]) for x in shape.D0)
    k = 2 if mode == "UD2U" else 1
    v0 = 2 * u + k * d
    vr = 2 * shape.r + k * shape.d_radius
    w0 = 2 * d + 2 * u + v0
    wr = 2 * shape.d_radius + 2 * shape.r + vr
    return v0, vr, w0, wr


def _random_word(F: FreeGroup, rng, length: int) -> str:
    g = ""
    while F.length(g) < length:
        g = F.multiply(F.gens[rng.randrange(len(F.gens))], g)
    return g


def _random_blob(F: FreeGroup, rng, center: str, size: int) -> set:
    blob = {center}
    while len(blob) < size:
        g = rng.choice(sorted(blob, key=F.sort_key))
        blob.add(rng.choice(F.neighbors(g)))
    return blob


def _v_close(g, h, v0, vr, F) -> bool:
    return abs(g[0][0] - h[0][0]) <= v0 and F.distance(g[1], h[1]) <= vr


def random_claims_instance(
    shape: ProductShape,
    rng,
    pieces: int = 2,
    mode: str = "UD2U",
    spread: int = 2,
    attempts: int = 400,
) -> ClaimsInstance:
    """Pieces in ``B_N^*`` that are pairwise ``DUVUD``-apart, with anchors around them.

    ``B_list[i]`` is a ``V``-spaced set of points ``g`` with ``D U g``
    meeting ``S_i``; ``B_extra`` are further ``V``-spaced points with
    ``D U g`` missing every ``S_i``, sampled close to the pieces so that
    the claims are actually exercised.
    """
    spec, F = shape.spec, shape.free
    G = spec.left
    v0, vr, w0, wr = shape_radii(shape, mode)
    N = shape.N
    S_list: list[set] = [set() for _ in range(pieces)]
    for i in range(pieces):
        blobs = 1 + rng.randrange(3)
        made = 0
        for _ in range(attempts):
            if made == blobs:
                break
            if S_list[i] and rng.random() < 0.5:
                # a neighbour blob just beyond distance N of this piece
                c, x = rng.choice(sorted(S_list[i], key=spec.sort_key))
                c = (c[0] + rng.randint(-1, 1),)
                centre = F.multiply(_random_word(F, rng, N + 1 + rng.randrange(3)), x)
            else:
                c = (rng.randint(-spread, spread),)
                centre = _random_word(F, rng, wr // 2 + 1 + rng.randrange(4))
            blob = {(c, x) for x in _random_blob(F, rng, centre, 1 + rng.randrange(3))}
            mine = coset_slices(spec, S_list[i]).get(c, set())
            if any(F.distance(x, s) <= N for _, x in blob for s in mine):
                continue
            if any(
                abs(s[0][0] - t[0][0]) <= w0 and F.distance(s[1], t[1]) <= wr
                for j in range(pieces)
                if j != i
                for s in S_list[j]
                for t in blob
            ):
                continue
            S_list[i] |= blob
            made += 1
        if not S_list[i]:
            raise RuntimeError("could not place a piece; loosen the instance parameters")

    def sample_near(points, extra_radius):
        c, x = rng.choice(points)
        u0 = rng.choice(shape.U0)
        d0 = rng.choice(shape.D0)
        step = _random_word(F, rng, rng.randint(0, shape.r + extra_radius))
        return (G.multiply(G.multiply(u0, d0), c), F.multiply(step, x))

    chosen: list = []
    B_list = []
    for S in S_list:
        pts = sorted(S, key=spec.sort_key)
        B = []
        for _ in range(40):
            g = sample_near(pts, shape.d_radius)
            if not _du_meets(shape, g, S):
                continue
            if any(_v_close(g, h, v0, vr, F) for h in chosen):
                continue
            B.append(g)
            chosen.append(g)
        B_list.append(B)

    all_S = [s for S in S_list for s in S]
    J_pts = sorted(set(all_S) | shape.UB(chosen), key=spec.sort_key)
    B_extra = []
    for _ in range(60):
        g = sample_near(J_pts, 2 * shape.d_radius + shape.r)
        if any(_du_meets(shape, g, S) for S in S_list):
            continue
        if any(_v_close(g, h, v0, vr, F) for h in chosen):
            continue
        B_extra.append(g)
        chosen.append(g)
    return ClaimsInstance(
        shape,
        [FiniteSubset(spec, S) for S in S_list],
        B_list,
        B_extra,
        v0,
        vr,
        w0,
        wr,
    )


def _du_meets(shape: ProductShape, g, S) -> bool:
    """``D U g`` meets ``S``."""
    u = max(abs(x[0]) for x in shape.U0)
    d = max(abs(x[0]) for x in shape.D0)
    F = shape.free
    return any(
        abs(s[0][0] - g[0][0]) <= u + d and F.distance(s[1], g[1]) <= shape.r + shape.d_radius
        for s in S
    )


# -- end-to-end gluing through the augmented pieces ------------------------------


@dataclass
class ProductGlueResult:
    y: Pattern
    pieces: list
    J: list
    y_list: list


def glue_through_ji(shift: Shift, alpha: Pattern, inst: ClaimsInstance, seed: int) -> ProductGlueResult:
    """Glue configurations ``y_i`` on their pieces ``S_i`` through the ``J_i``.

    Each ``y_i`` is a window configuration with ``alpha`` pinned at its
    anchors ``B_i``. The final gluing takes ``y_i`` on ``J_i`` together
    with fresh copies of ``alpha`` at the extra anchors.
    """
    shape = inst.shape
    y_list, J_list = [], []
    for i, (S, B) in enumerate(zip(inst.S_list, inst.B_list)):
        J = augment_ji(S, B, shape)
        pins = [pin_alpha(alpha, g) for g in B]
        y_i = glue(shift, pins, J.as_set(), rng=derive_rng(seed, i))
        y_list.append(y_i)
        J_list.append(J)
    pieces = [y.restrict(J) for y, J in zip(y_list, J_list)]
    pieces += [pin_alpha(alpha, g) for g in inst.B_extra]
    window = set()
    for p in pieces:
        window |= set(p.values)
    y = glue(shift, pieces, window)
    return ProductGlueResult(y, pieces, J_list, y_list)


def check_pinned(y: Pattern, alpha: Pattern, anchors) -> list:
    """Anchors ``g`` where ``(g . y)|_U`` differs from ``alpha``."""
    spec = y.spec
    mul = spec.multiply
    return [g for g in anchors if any(y.get(mul(h, g)) != v for h, v in alpha.values.items())]
