"""Patterns, the shift action on them, pattern sets and the gluing engine."""

from __future__ import annotations

import itertools
from typing import Iterable

from .groups import (
    F2,
    Factor,
    FiniteSubset,
    FreeGroup,
    GroupSpec,
    Product,
    SpecMismatchError,
    Window,
    components,
    set_distance,
)


class Infeasible(Exception):
    """No valid configuration agrees with the given data.

    ``reason`` is one of ``"overlap"``, ``"hall"``, ``"color-exhaustion"``
    or ``"invalid"``; ``witness`` is the conflicting cell, the
    Hall-violating region, or the stuck cell respectively.
    """

    def __init__(self, reason: str, witness=None, detail: str = ""):
        super().__init__(f"{reason}: {detail}" if detail else reason)
        self.reason = reason
        self.witness = witness


class PreconditionError(ValueError):
    pass


class InvalidFixedData(PreconditionError, Infeasible):
    """Fixed data that already breaks the shift's rules.

    It is a precondition failure for the caller and, at the same time, a
    verified verdict that no extension exists.
    """

    def __init__(self, witness=None, detail: str = ""):
        Infeasible.__init__(self, "invalid", witness, detail)


class EnumerationTooLarge(RuntimeError):
    pass


class Pattern:
    """A finite partial configuration: group element -> symbol in ``range(alphabet)``."""

    __slots__ = ("spec", "values", "alphabet", "_hash")

    def __init__(self, spec: GroupSpec, values: dict, alphabet: int):
        self.spec = spec
        self.values = dict(values)
        self.alphabet = alphabet
        self._hash = None

    @property
    def domain(self) -> FiniteSubset:
        return FiniteSubset(self.spec, self.values)

    def __getitem__(self, g) -> int:
        return self.values[g]

    def get(self, g, default=None):
        return self.values.get(g, default)

    def __contains__(self, g) -> bool:
        return g in self.values

    def __len__(self) -> int:
        return len(self.values)

    def items(self) -> list:
        return [(g, self.values[g]) for g in self.spec.sorted(self.values)]

    def restrict(self, S) -> "Pattern":
        return Pattern(self.spec, {g: self.values[g] for g in S if g in self.values}, self.alphabet)

    def agrees_with(self, other: "Pattern") -> bool:
        return all(self.values.get(g, v) == v for g, v in other.values.items())

    def key(self) -> tuple:
        """Symbols listed in ShortLex domain order; orders patterns on a common domain."""
        return tuple(v for _, v in self.items())

    def __eq__(self, other) -> bool:
        if not isinstance(other, Pattern):
            return NotImplemented
        return self.spec == other.spec and self.alphabet == other.alphabet and self.values == other.values

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.alphabet, frozenset(self.values.items())))
        return self._hash

    def __repr__(self) -> str:
        shown = ", ".join(f"{self.spec.format(g)}:{v}" for g, v in self.items()[:8])
        more = ", ..." if len(self) > 8 else ""
        return f"Pattern({{{shown}{more}}}, alphabet={self.alphabet})"


def translate_pattern(g, p: Pattern) -> Pattern:
    """``g . p``: domain ``dom(p) g^-1`` with ``(g . p)(h) = p(h g)``."""
    spec = p.spec
    ginv = spec.inverse(g)
    mul = spec.multiply
    return Pattern(spec, {mul(h, ginv): v for h, v in p.values.items()}, p.alphabet)


def merge_patterns(pieces: Iterable[Pattern]) -> Pattern:
    """Union of patterns; raises ``Infeasible("overlap")`` on a disagreement."""
    pieces = list(pieces)
    if not pieces:
        raise ValueError("nothing to merge")
    spec, alphabet = pieces[0].spec, pieces[0].alphabet
    merged: dict = {}
    for p in pieces:
        if p.spec != spec:
            raise SpecMismatchError(f"{p.spec} vs {spec}")
        for g, v in p.values.items():
            old = merged.setdefault(g, v)
            if old != v:
                raise Infeasible("overlap", g, f"pieces disagree at {spec.format(g)}")
    return Pattern(spec, merged, alphabet)


# -- shifts --------------------------------------------------------------------


class Shift:
    """A subshift handled through finite windows.

    ``extend`` is the extension oracle: it returns a valid configuration
    on the window agreeing with the given pattern, or raises
    ``Infeasible``. Implementations guarantee the window answer is also
    the answer for the infinite shift.
    """

    spec: GroupSpec
    alphabet: int
    margin: int = 0

    def is_valid(self, p: Pattern) -> bool:
        raise NotImplementedError

    def extend(self, p: Pattern, window, rng=None) -> Pattern:
        raise NotImplementedError

    def empty(self) -> Pattern:
        return Pattern(self.spec, {}, self.alphabet)

    def to_json(self) -> dict:
        raise NotImplementedError


class FullShift(Shift):
    def __init__(self, spec: GroupSpec, alphabet: int):
        if alphabet < 1:
            raise ValueError("alphabet must be non-empty")
        self.spec = spec
        self.alphabet = alphabet
        self.margin = 0

    def is_valid(self, p: Pattern) -> bool:
        return all(0 <= v < self.alphabet for v in p.values.values())

    def extend(self, p: Pattern, window, rng=None) -> Pattern:
        if not self.is_valid(p):
            raise Infeasible("invalid", None, "symbol outside the alphabet")
        values = dict(p.values)
        for w in window:
            if w not in values:
                values[w] = rng.randrange(self.alphabet) if rng is not None else 0
        return Pattern(self.spec, values, self.alphabet)

    def to_json(self) -> dict:
        return {"kind": "full", "alphabet": self.alphabet}

    def __repr__(self):
        return f"FullShift({self.spec}, {self.alphabet})"


def _window_members(window) -> set:
    return set(window.elements()) if isinstance(window, Window) else set(window)


def glue(shift: Shift, pieces: Iterable[Pattern], window, rng=None) -> Pattern:
    """One valid window configuration agreeing with every piece.

    Raises ``Infeasible`` with a witness when none exists.
    """
    pieces = list(pieces)
    merged = merge_patterns(pieces) if pieces else shift.empty()
    if isinstance(window, Window):
        outside = [g for g in merged.values if g not in window]
    else:
        members = _window_members(window)
        outside = [g for g in merged.values if g not in members]
    if outside:
        raise PreconditionError(f"piece cell {shift.spec.format(outside[0])} lies outside the window")
    return shift.extend(merged, window, rng)


def can_glue(shift: Shift, pieces: Iterable[Pattern], window) -> bool:
    try:
        glue(shift, pieces, window)
    except Infeasible:
        return False
    return True


def pattern_set(shift: Shift, U, window=None, cap: int = 200_000) -> set[Pattern]:
    """All ``U``-patterns of the shift: restrictions of valid window configurations.

    Partial assignments are pruned by local validity; complete ones are
    kept when the extension oracle accepts them on ``window`` (by default
    the shift's own choice for ``U``).
    """
    spec = shift.spec
    cells = spec.sorted(set(U))
    if isinstance(shift, FullShift):
        if shift.alphabet ** len(cells) > cap:
            raise EnumerationTooLarge(f"{shift.alphabet}^{len(cells)} patterns")
        return {
            Pattern(spec, dict(zip(cells, vals)), shift.alphabet)
            for vals in itertools.product(range(shift.alphabet), repeat=len(cells))
        }
    if window is None:
        window = default_window(shift, cells)
    out: set[Pattern] = set()
    visited = 0
    values: dict = {}

    def rec(i: int):
        nonlocal visited
        visited += 1
        if visited > cap:
            raise EnumerationTooLarge(f"more than {cap} partial patterns")
        if i == len(cells):
            p = Pattern(spec, values, shift.alphabet)
            try:
                shift.extend(p, window)
            except Infeasible:
                return
            out.add(p)
            return
        for v in range(shift.alphabet):
            values[cells[i]] = v
            if shift.is_valid(Pattern(spec, values, shift.alphabet)):
                rec(i + 1)
            del values[cells[i]]

    rec(0)
    return out


def default_window(shift: Shift, cells) -> list:
    """Cells plus a margin ball around them; the shift hulls it if needed."""
    from .groups import expand

    return sorted(expand(shift.spec, cells, max(shift.margin, 1)), key=shift.spec.sort_key)


def sorted_patterns(patterns: Iterable[Pattern]) -> list[Pattern]:
    return sorted(patterns, key=Pattern.key)


# -- B_n classes ---------------------------------------------------------------


def _free_factor(spec: GroupSpec) -> FreeGroup:
    if isinstance(spec, FreeGroup):
        return spec
    if isinstance(spec, Product) and isinstance(spec.right, FreeGroup):
        return spec.right
    raise SpecMismatchError(f"{spec} is neither F_k nor G x F_k")


def b_class_check(S, n: int, spec: GroupSpec = F2) -> bool:
    """Components of ``S`` pairwise at distance at least ``n + 1``."""
    comps = components(spec, S)
    for i, A in enumerate(comps):
        for B in comps[i + 1 :]:
            if set_distance(spec, A, B) <= n:
                return False
    return True


def coset_slices(spec: Product, S) -> dict:
    """Group a subset of ``G x F`` by F-coset: ``{g: set of F-coordinates}``."""
    out: dict = {}
    for g, s in S:
        out.setdefault(g, set()).add(s)
    return out


def b_star_class_check(S, n: int, spec: GroupSpec) -> bool:
    """Every F2-coset slice of ``S`` lies in ``B_n``."""
    if not isinstance(spec, Product):
        raise SpecMismatchError("B_n^* needs a product group G x F2")
    free = _free_factor(spec)
    return all(b_class_check(sl, n, free) for sl in coset_slices(spec, S).values())


def in_class(S, n: int, spec: GroupSpec) -> bool:
    if isinstance(spec, Product):
        return b_star_class_check(S, n, spec)
    return b_class_check(S, n, spec)


def class_components(spec: GroupSpec, S) -> list[FiniteSubset]:
    """Tree components: plain components in F_k, coset-wise ones in ``G x F_k``."""
    if isinstance(spec, Product):
        delta = Factor(spec, "right")
        out = []
        for comps in _by_coset(delta, S):
            out.extend(comps)
        return out
    return components(spec, S)


def _by_coset(delta, S):
    from .groups import components_by_coset

    return components_by_coset(S, delta).values()


def tree_apart(spec: GroupSpec, A, B, n: int) -> bool:
    """``D_n``-apart in the tree direction: no same-coset pair within distance ``n``."""
    if isinstance(spec, Product):
        free = _free_factor(spec)
        sa, sb = coset_slices(spec, A), coset_slices(spec, B)
        for g in sa.keys() & sb.keys():
            if set_distance(free, sa[g], sb[g]) <= n:
                return False
        return True
    d = set_distance(spec, A, B)
    return d is None or d > n


def bn_glue_via_components(shift: Shift, pieces: list[Pattern], n: int, window, rng=None) -> Pattern:
    """Glue ``B_n`` pieces by gluing the family of all their components."""
    spec = shift.spec
    doms = [p.domain for p in pieces]
    for i, dom in enumerate(doms):
        if not in_class(dom, n, spec):
            raise PreconditionError(f"piece {i} is not in B_{n}")
    for i, j in itertools.combinations(range(len(doms)), 2):
        if not tree_apart(spec, doms[i], doms[j], n):
            raise PreconditionError(f"pieces {i} and {j} are not D_{n}-apart")
    family = [(p, c) for p, dom in zip(pieces, doms) for c in class_components(spec, dom)]
    for (_, a), (_, b) in itertools.combinations(family, 2):
        if not tree_apart(spec, a, b, n):
            raise PreconditionError("component family is not pairwise apart")
    return glue(shift, [p.restrict(c) for p, c in family], window, rng)
