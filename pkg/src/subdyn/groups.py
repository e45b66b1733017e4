"""Marked groups, windows, finite subsets and subgroup descriptors.

Elements are plain hashable values so that large windows stay cheap:

* free group words are strings over ``a, b, ...`` with upper case letters
  for inverses (``"aB"`` is ``a b^-1``), the identity is ``""``;
* lattice points are tuples of ints;
* product elements are pairs ``(left, right)``.

Every group carries a fixed generator order; the canonical order on
elements is ShortLex (word length, then the lexicographic order of the
least normal-form word over that generator order).
"""

from __future__ import annotations

import itertools
import json
import re
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Hashable, Iterable, Iterator

Elem = Hashable

_FREE_LETTERS = [c for c in "abcdfghijklmnopqrstuvwxyz"]  # 'e' names the identity


class SpecMismatchError(ValueError):
    """An element was used with a group it does not belong to."""


class UnsupportedOperationError(ValueError):
    """The requested operation is not defined for this group or subgroup."""


class EmptyWindowError(ValueError):
    pass


class GroupSpec:
    """Common behaviour of marked groups; subclasses supply the group law."""

    identity: Elem

    @property
    def gens(self) -> tuple:
        raise NotImplementedError

    @property
    def labels(self) -> tuple[str, ...]:
        raise NotImplementedError

    def multiply(self, g, h):
        raise NotImplementedError

    def inverse(self, g):
        raise NotImplementedError

    def length(self, g) -> int:
        raise NotImplementedError

    def word(self, g) -> tuple[int, ...]:
        """Least normal-form word of ``g`` as a tuple of generator indices."""
        raise NotImplementedError

    def is_element(self, g) -> bool:
        raise NotImplementedError

    def format(self, g) -> str:
        raise NotImplementedError

    def parse(self, text: str):
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError

    def random_element(self, rng, max_length: int):
        raise NotImplementedError

    # -- shared machinery ------------------------------------------------

    def check(self, g):
        if not self.is_element(g):
            raise SpecMismatchError(f"{g!r} is not an element of {self}")
        return g

    def distance(self, g, h) -> int:
        """Word metric; equals the graph distance in the left Cayley graph."""
        return self.length(self.multiply(g, self.inverse(h)))

    def neighbors(self, g) -> list:
        return [self.multiply(s, g) for s in self.gens]

    def sort_key(self, g):
        w = self.word(g)
        return (len(w), w)

    def sorted(self, elements: Iterable) -> list:
        return sorted(elements, key=self.sort_key)

    def ball(self, radius: int) -> tuple:
        """All elements within word length ``radius``, in ShortLex order."""
        seen = {self.identity}
        frontier = [self.identity]
        for _ in range(radius):
            nxt = []
            for g in frontier:
                for h in self.neighbors(g):
                    if h not in seen:
                        seen.add(h)
                        nxt.append(h)
            frontier = nxt
        return tuple(self.sorted(seen))

    def generator(self, label: str):
        return self.gens[self.labels.index(label)]


@dataclass(frozen=True)
class FreeGroup(GroupSpec):
    rank: int = 2

    def __post_init__(self):
        if not 1 <= self.rank <= len(_FREE_LETTERS):
            raise ValueError(f"unsupported free group rank {self.rank}")

    def __str__(self):
        return f"F{self.rank}"

    identity = ""

    @cached_property
    def letters(self) -> str:
        low = "".join(_FREE_LETTERS[: self.rank])
        return low + low.upper()

    @cached_property
    def _order(self) -> dict[str, int]:
        return {c: i for i, c in enumerate(self.letters)}

    @property
    def gens(self) -> tuple:
        return tuple(self.letters)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(self.format(c) for c in self.letters)

    def multiply(self, g: str, h: str) -> str:
        i, n = 0, min(len(g), len(h))
        while i < n and g[-1 - i] == h[i].swapcase():
            i += 1
        return g[: len(g) - i] + h[i:]

    def inverse(self, g: str) -> str:
        return g[::-1].swapcase()

    def length(self, g: str) -> int:
        return len(g)

    def word(self, g: str) -> tuple[int, ...]:
        order = self._order
        return tuple(order[c] for c in g)

    def sort_key(self, g):
        order = self._order
        return (len(g), tuple(order[c] for c in g))

    def is_element(self, g) -> bool:
        if not isinstance(g, str):
            return False
        order = self._order
        if any(c not in order for c in g):
            return False
        return all(g[i] != g[i + 1].swapcase() for i in range(len(g) - 1))

    def format(self, g: str) -> str:
        if not g:
            return "e"
        out = []
        for letter, run in itertools.groupby(g):
            k = len(list(run))
            base = letter.lower()
            exp = -k if letter.isupper() else k
            out.append(base if exp == 1 else f"{base}^{exp}")
        return "".join(out)

    _TOKEN = re.compile(r"([a-z])(?:\^(-?\d+))?")

    def parse(self, text: str) -> str:
        text = text.strip()
        if text in ("", "e", "1"):
            return ""
        pos, g = 0, ""
        while pos < len(text):
            m = self._TOKEN.match(text, pos)
            if not m or m.group(1) not in self._order:
                raise SpecMismatchError(f"cannot parse {text!r} as an element of {self}")
            exp = int(m.group(2)) if m.group(2) is not None else 1
            letter = m.group(1) if exp > 0 else m.group(1).upper()
            g = self.multiply(g, letter * abs(exp))
            pos = m.end()
        return g

    def to_json(self) -> dict:
        return {"kind": "free", "rank": self.rank}

    def random_element(self, rng, max_length: int) -> str:
        n = rng.randint(0, max_length)
        g = ""
        while len(g) < n:
            c = rng.choice(self.letters)
            if not g or g[-1] != c.swapcase():
                g += c
        return g

    def ball(self, radius: int) -> tuple:
        # Children of a reduced word w are w + c for c not cancelling; this
        # visits words in ShortLex order when letters are tried in order.
        level, out = [""], [""]
        for _ in range(radius):
            level = [w + c for w in level for c in self.letters if not w or w[-1] != c.swapcase()]
            out.extend(level)
        return tuple(out)

    def ball_size(self, radius: int) -> int:
        k = 2 * self.rank
        return 1 + sum(k * (k - 1) ** (i - 1) for i in range(1, radius + 1))


@dataclass(frozen=True)
class Lattice(GroupSpec):
    dim: int = 1

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("lattice dimension must be positive")

    def __str__(self):
        return "Z" if self.dim == 1 else f"Z^{self.dim}"

    @property
    def identity(self) -> tuple:
        return (0,) * self.dim

    @cached_property
    def gens(self) -> tuple:
        units = [tuple(int(i == j) for j in range(self.dim)) for i in range(self.dim)]
        return tuple(units) + tuple(tuple(-x for x in u) for u in units)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(f"+e{i + 1}" for i in range(self.dim)) + tuple(
            f"-e{i + 1}" for i in range(self.dim)
        )

    def multiply(self, g, h) -> tuple:
        return tuple(x + y for x, y in zip(g, h))

    def inverse(self, g) -> tuple:
        return tuple(-x for x in g)

    def length(self, g) -> int:
        return sum(abs(x) for x in g)

    def word(self, g) -> tuple[int, ...]:
        pos = [i for i, x in enumerate(g) if x > 0 for _ in range(x)]
        neg = [self.dim + i for i, x in enumerate(g) if x < 0 for _ in range(-x)]
        return tuple(pos + neg)

    def is_element(self, g) -> bool:
        return (
            isinstance(g, tuple)
            and len(g) == self.dim
            and all(isinstance(x, int) and not isinstance(x, bool) for x in g)
        )

    def format(self, g) -> str:
        return "[" + ",".join(str(x) for x in g) + "]"

    def parse(self, text: str) -> tuple:
        try:
            vals = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SpecMismatchError(f"cannot parse {text!r} as a lattice point") from exc
        g = tuple(vals) if isinstance(vals, list) else None
        if g is None or not self.is_element(g):
            raise SpecMismatchError(f"{text!r} is not an element of {self}")
        return g

    def to_json(self) -> dict:
        return {"kind": "lattice", "dim": self.dim}

    def random_element(self, rng, max_length: int) -> tuple:
        g = self.identity
        for _ in range(rng.randint(0, max_length)):
            g = self.multiply(g, rng.choice(self.gens))
        return g


@dataclass(frozen=True)
class Product(GroupSpec):
    left: GroupSpec
    right: GroupSpec

    def __str__(self):
        return f"{self.left}x{self.right}"

    @property
    def identity(self) -> tuple:
        return (self.left.identity, self.right.identity)

    @cached_property
    def gens(self) -> tuple:
        return tuple((s, self.right.identity) for s in self.left.gens) + tuple(
            (self.left.identity, t) for t in self.right.gens
        )

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(f"L{s}" for s in self.left.labels) + tuple(f"R{t}" for t in self.right.labels)

    def multiply(self, g, h) -> tuple:
        return (self.left.multiply(g[0], h[0]), self.right.multiply(g[1], h[1]))

    def inverse(self, g) -> tuple:
        return (self.left.inverse(g[0]), self.right.inverse(g[1]))

    def length(self, g) -> int:
        return self.left.length(g[0]) + self.right.length(g[1])

    def word(self, g) -> tuple[int, ...]:
        k = len(self.left.gens)
        return self.left.word(g[0]) + tuple(k + i for i in self.right.word(g[1]))

    def is_element(self, g) -> bool:
        return (
            isinstance(g, tuple)
            and len(g) == 2
            and self.left.is_element(g[0])
            and self.right.is_element(g[1])
        )

    def format(self, g) -> str:
        return f"({self.left.format(g[0])},{self.right.format(g[1])})"

    def parse(self, text: str) -> tuple:
        text = text.strip()
        if not (text.startswith("(") and text.endswith(")")):
            raise SpecMismatchError(f"{text!r} is not a product element")
        body, depth = text[1:-1], 0
        for i, c in enumerate(body):
            if c in "([":
                depth += 1
            elif c in ")]":
                depth -= 1
            elif c == "," and depth == 0:
                return (self.left.parse(body[:i]), self.right.parse(body[i + 1 :]))
        raise SpecMismatchError(f"{text!r} is not a product element")

    def to_json(self) -> dict:
        return {"kind": "product", "left": self.left.to_json(), "right": self.right.to_json()}

    def random_element(self, rng, max_length: int) -> tuple:
        return (
            self.left.random_element(rng, max_length),
            self.right.random_element(rng, max_length),
        )


F2 = FreeGroup(2)
Z = Lattice(1)
Z2 = Lattice(2)


def group_from_json(data: dict) -> GroupSpec:
    kind = data.get("kind")
    if kind == "free":
        return FreeGroup(int(data.get("rank", 2)))
    if kind == "lattice":
        return Lattice(int(data.get("dim", 1)))
    if kind == "product":
        return Product(group_from_json(data["left"]), group_from_json(data["right"]))
    raise UnsupportedOperationError(f"unknown group kind {kind!r}")


# -- finite sets ---------------------------------------------------------------


class FiniteSubset:
    """An explicit finite set of group elements, iterated in ShortLex order.

    ``window`` records the region relative to which maximality or
    syndeticity of the set is meant; it is informational.
    """

    __slots__ = ("spec", "_set", "_sorted", "window")

    def __init__(self, spec: GroupSpec, elements: Iterable = (), window=None):
        self.spec = spec
        self._set = frozenset(elements)
        self._sorted = None
        self.window = window

    @classmethod
    def checked(cls, spec: GroupSpec, elements: Iterable, window=None) -> "FiniteSubset":
        elements = list(elements)
        for g in elements:
            spec.check(g)
        return cls(spec, elements, window)

    @property
    def elements(self) -> tuple:
        if self._sorted is None:
            self._sorted = tuple(self.spec.sorted(self._set))
        return self._sorted

    def __iter__(self) -> Iterator:
        return iter(self.elements)

    def __len__(self) -> int:
        return len(self._set)

    def __contains__(self, g) -> bool:
        return g in self._set

    def __bool__(self) -> bool:
        return bool(self._set)

    def __eq__(self, other) -> bool:
        if isinstance(other, FiniteSubset):
            return self.spec == other.spec and self._set == other._set
        if isinstance(other, (set, frozenset)):
            return self._set == other
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self._set)

    def __repr__(self) -> str:
        shown = ", ".join(self.spec.format(g) for g in self.elements[:8])
        more = ", ..." if len(self) > 8 else ""
        return f"FiniteSubset({self.spec}, {{{shown}{more}}})"

    def _coerce(self, other) -> frozenset:
        if isinstance(other, FiniteSubset):
            if other.spec != self.spec:
                raise SpecMismatchError(f"{other.spec} vs {self.spec}")
            return other._set
        return frozenset(other)

    def __or__(self, other) -> "FiniteSubset":
        return FiniteSubset(self.spec, self._set | self._coerce(other))

    def __and__(self, other) -> "FiniteSubset":
        return FiniteSubset(self.spec, self._set & self._coerce(other))

    def __sub__(self, other) -> "FiniteSubset":
        return FiniteSubset(self.spec, self._set - self._coerce(other))

    def isdisjoint(self, other) -> bool:
        return self._set.isdisjoint(self._coerce(other))

    def issubset(self, other) -> bool:
        if isinstance(other, FiniteSubset):
            return self._set <= other._set
        return all(g in other for g in self._set)

    def as_set(self) -> frozenset:
        return self._set

    def translate(self, g) -> "FiniteSubset":
        """Right translate ``S g``."""
        mul = self.spec.multiply
        return FiniteSubset(self.spec, (mul(s, g) for s in self._set))

    def left_translate(self, g) -> "FiniteSubset":
        mul = self.spec.multiply
        return FiniteSubset(self.spec, (mul(g, s) for s in self._set))

    def inverse(self) -> "FiniteSubset":
        inv = self.spec.inverse
        return FiniteSubset(self.spec, (inv(s) for s in self._set))

    def symmetrize(self) -> "FiniteSubset":
        return self | self.inverse()

    def radius(self) -> int:
        return max((self.spec.length(g) for g in self._set), default=0)

    def restrict(self, pred) -> "FiniteSubset":
        return FiniteSubset(self.spec, (g for g in self._set if pred(g)))


def as_subset(spec: GroupSpec, elements) -> FiniteSubset:
    if isinstance(elements, FiniteSubset):
        if elements.spec != spec:
            raise SpecMismatchError(f"{elements.spec} vs {spec}")
        return elements
    if isinstance(elements, Window):
        return FiniteSubset(spec, elements.elements(), elements)
    return FiniteSubset(spec, elements)


def set_product(spec: GroupSpec, A, B):
    """The product set ``A B = {ab}``.

    Balls multiply to balls and product windows multiply factorwise, so
    such products stay implicit; anything else is enumerated.
    """
    if isinstance(A, Ball) and isinstance(B, Ball):
        return Ball(spec, A.radius + B.radius)
    if isinstance(A, ProductWindow) and isinstance(B, ProductWindow):
        return ProductWindow(
            spec,
            set_product(spec.left, A.left, B.left),
            set_product(spec.right, A.right, B.right),
        )
    mul = spec.multiply
    return FiniteSubset(spec, {mul(a, b) for a in _iter(A) for b in _iter(B)})


def _iter(A):
    return A.elements() if isinstance(A, Window) else iter(A)


def explicit(spec: GroupSpec, A) -> FiniteSubset:
    return as_subset(spec, A)


# -- windows -------------------------------------------------------------------


class Window:
    """A finite region of a group that can answer membership cheaply."""

    spec: GroupSpec

    def __contains__(self, g) -> bool:
        raise NotImplementedError

    def _enumerate(self) -> Iterable:
        raise NotImplementedError

    def shrink(self, margin: int) -> "Window":
        raise NotImplementedError

    @property
    def radius(self) -> int:
        raise NotImplementedError

    def elements(self) -> tuple:
        cache = self.__dict__.get("_elements")
        if cache is None:
            cache = tuple(self.spec.sorted(self._enumerate()))
            self.__dict__["_elements"] = cache
        return cache

    def __iter__(self):
        return iter(self.elements())

    def __len__(self) -> int:
        return len(self.elements())

    def size(self) -> int:
        """Number of elements, without enumerating when a formula is known."""
        return len(self.elements())

    def subset(self) -> FiniteSubset:
        return FiniteSubset(self.spec, self.elements(), self)

    def is_empty(self) -> bool:
        return len(self) == 0


class Ball(Window):
    def __init__(self, spec: GroupSpec, radius: int):
        if radius < 0:
            raise EmptyWindowError("negative radius")
        self.spec = spec
        self._radius = radius

    @property
    def radius(self) -> int:
        return self._radius

    def __contains__(self, g) -> bool:
        return self.spec.is_element(g) and self.spec.length(g) <= self._radius

    def _enumerate(self):
        return self.spec.ball(self._radius)

    def elements(self) -> tuple:
        cache = self.__dict__.get("_elements")
        if cache is None:
            cache = self.spec.ball(self._radius)
            self.__dict__["_elements"] = cache
        return cache

    def size(self) -> int:
        if isinstance(self.spec, FreeGroup) and "_elements" not in self.__dict__:
            return self.spec.ball_size(self._radius)
        return len(self.elements())

    def shrink(self, margin: int) -> "Ball":
        if margin > self._radius:
            raise EmptyWindowError(f"margin {margin} exceeds radius {self._radius}")
        return Ball(self.spec, self._radius - margin)

    def __eq__(self, other):
        return isinstance(other, Ball) and (self.spec, self._radius) == (other.spec, other._radius)

    def __hash__(self):
        return hash(("ball", self.spec, self._radius))

    def __repr__(self):
        return f"Ball({self.spec}, {self._radius})"


class Box(Window):
    def __init__(self, spec: GroupSpec, bounds):
        if not isinstance(spec, Lattice):
            raise UnsupportedOperationError("boxes live in lattices")
        bounds = tuple((int(lo), int(hi)) for lo, hi in bounds)
        if len(bounds) != spec.dim:
            raise SpecMismatchError(f"{len(bounds)} bounds for {spec}")
        self.spec = spec
        self.bounds = bounds

    @property
    def radius(self) -> int:
        return sum(max(abs(lo), abs(hi)) for lo, hi in self.bounds)

    def __contains__(self, g) -> bool:
        return self.spec.is_element(g) and all(lo <= x <= hi for x, (lo, hi) in zip(g, self.bounds))

    def _enumerate(self):
        return itertools.product(*(range(lo, hi + 1) for lo, hi in self.bounds))

    def shrink(self, margin: int) -> "Box":
        new = tuple((lo + margin, hi - margin) for lo, hi in self.bounds)
        if any(lo > hi for lo, hi in new):
            raise EmptyWindowError(f"margin {margin} empties {self!r}")
        return Box(self.spec, new)

    def __eq__(self, other):
        return isinstance(other, Box) and (self.spec, self.bounds) == (other.spec, other.bounds)

    def __hash__(self):
        return hash(("box", self.spec, self.bounds))

    def __repr__(self):
        return f"Box({self.spec}, {list(self.bounds)})"


class ProductWindow(Window):
    """``left x right`` inside a product group; factors may be windows or finite sets."""

    def __init__(self, spec: Product, left, right):
        if not isinstance(spec, Product):
            raise UnsupportedOperationError("product windows need a product group")
        self.spec = spec
        self.left = left
        self.right = right

    @property
    def radius(self) -> int:
        return _radius(self.spec.left, self.left) + _radius(self.spec.right, self.right)

    def __contains__(self, g) -> bool:
        return isinstance(g, tuple) and len(g) == 2 and g[0] in self.left and g[1] in self.right

    def _enumerate(self):
        return itertools.product(_iter(self.left), _iter(self.right))

    def size(self) -> int:
        return _size(self.left) * _size(self.right)

    def shrink(self, margin: int) -> "ProductWindow":
        return ProductWindow(self.spec, _shrink(self.left, margin), _shrink(self.right, margin))

    def __eq__(self, other):
        return isinstance(other, ProductWindow) and (self.spec, self.left, self.right) == (
            other.spec,
            other.left,
            other.right,
        )

    def __hash__(self):
        return hash(("product", self.spec, self.left, self.right))

    def __repr__(self):
        return f"ProductWindow({self.left!r}, {self.right!r})"


def _radius(spec, A) -> int:
    if isinstance(A, Window):
        return A.radius
    return max((spec.length(g) for g in A), default=0)


def _size(A) -> int:
    return A.size() if isinstance(A, Window) else len(A)


def _shrink(A, margin):
    if isinstance(A, Window):
        return A.shrink(margin)
    raise UnsupportedOperationError("explicit factors cannot be shrunk")


def window_inner(window, U) -> FiniteSubset:
    """Elements ``w`` of ``window`` with ``U w`` inside the window."""
    spec = window.spec
    mul = spec.multiply
    U = list(_iter(U))
    return FiniteSubset(spec, (w for w in window if all(mul(u, w) in window for u in U)))


# -- subgroups -----------------------------------------------------------------


class Subgroup:
    """Descriptor of a subgroup ``Delta``; cosets are right cosets ``Delta g``."""

    spec: GroupSpec

    def coset_key(self, g):
        """A canonical label of the right coset ``Delta g``."""
        raise NotImplementedError

    def contains(self, g) -> bool:
        return self.coset_key(g) == self.coset_key(self.spec.identity)

    def __contains__(self, g) -> bool:
        return self.contains(g)

    def coset(self, g, window) -> FiniteSubset:
        key = self.coset_key(g)
        return FiniteSubset(self.spec, (w for w in window if self.coset_key(w) == key))

    def elements_in(self, window) -> FiniteSubset:
        return self.coset(self.spec.identity, window)


@dataclass(frozen=True)
class Whole(Subgroup):
    spec: GroupSpec

    def coset_key(self, g):
        return ()


@dataclass(frozen=True)
class Factor(Subgroup):
    """One factor of a product group; ``side`` is ``"left"`` or ``"right"``."""

    spec: GroupSpec
    side: str

    def __post_init__(self):
        if not isinstance(self.spec, Product):
            raise UnsupportedOperationError(f"{self.spec} has no factors")
        if self.side not in ("left", "right"):
            raise ValueError("side must be 'left' or 'right'")

    @property
    def factor(self) -> GroupSpec:
        return self.spec.left if self.side == "left" else self.spec.right

    def coset_key(self, g):
        # Delta g for Delta = G x 1 is G x {g[1]}, and symmetrically.
        return g[1] if self.side == "left" else g[0]


@dataclass(frozen=True)
class Cyclic(Subgroup):
    """The cyclic subgroup generated by one generator (``<a>`` in F2, an axis in Z^d)."""

    spec: GroupSpec
    generator: Any

    def __post_init__(self):
        if self.generator not in self.spec.gens:
            raise UnsupportedOperationError("only generator-cyclic subgroups are supported")
        if not isinstance(self.spec, (FreeGroup, Lattice)):
            raise UnsupportedOperationError(f"cyclic subgroups of {self.spec} are not supported")

    def coset_key(self, g):
        if isinstance(self.spec, FreeGroup):
            c = self.generator.lower()
            return g.lstrip(c + c.upper())
        axis = next(i for i, x in enumerate(self.generator) if x)
        return tuple(0 if i == axis else x for i, x in enumerate(g))


def subgroup_from_json(spec: GroupSpec, data) -> Subgroup:
    if data in (None, "whole") or (isinstance(data, dict) and data.get("kind") == "whole"):
        return Whole(spec)
    kind = data.get("kind")
    if kind == "factor":
        return Factor(spec, data["side"])
    if kind == "cyclic":
        gen = data["generator"]
        if isinstance(gen, str) and gen in spec.labels:
            gen = spec.generator(gen)
        elif isinstance(gen, str):
            gen = spec.parse(gen)
        else:
            gen = tuple(gen)
        return Cyclic(spec, gen)
    raise UnsupportedOperationError(f"unknown subgroup kind {kind!r}")


# -- adjacency -----------------------------------------------------------------


def components(spec: GroupSpec, S) -> list[FiniteSubset]:
    """Connected components of ``S`` in the left Cayley graph, ShortLex ordered."""
    members = set(S)
    out = []
    for start in spec.sorted(members):
        if start not in members:
            continue
        members.discard(start)
        comp, queue = [start], deque([start])
        while queue:
            g = queue.popleft()
            for h in spec.neighbors(g):
                if h in members:
                    members.discard(h)
                    comp.append(h)
                    queue.append(h)
        out.append(FiniteSubset(spec, comp))
    return out


def components_in_coset(S, coset_rep, delta: Subgroup) -> list[FiniteSubset]:
    """Components of ``S`` intersected with the coset ``delta * coset_rep``.

    Adjacency is the Cayley adjacency of the ambient group restricted to
    the coset, so for the right factor of ``G x F2`` it is the F2 tree.
    """
    key = delta.coset_key(coset_rep)
    part = [g for g in S if delta.coset_key(g) == key]
    return components(delta.spec, part)


def components_by_coset(S, delta: Subgroup) -> dict:
    """Map each coset key meeting ``S`` to the components of ``S`` in that coset."""
    groups: dict = {}
    for g in S:
        groups.setdefault(delta.coset_key(g), []).append(g)
    spec = delta.spec
    keys = sorted(groups, key=lambda k: spec.sort_key(spec.sorted(groups[k])[0]))
    return {k: components(spec, groups[k]) for k in keys}


def expand(spec: GroupSpec, S, radius: int) -> set:
    """``D_radius S``: everything within ``radius`` of ``S`` (multi-source BFS)."""
    seen = set(S)
    frontier = list(seen)
    for _ in range(radius):
        nxt = []
        for g in frontier:
            for h in spec.neighbors(g):
                if h not in seen:
                    seen.add(h)
                    nxt.append(h)
        frontier = nxt
    return seen


def set_distance(spec: GroupSpec, S, T) -> int | None:
    """Least distance between ``S`` and ``T`` (``None`` if either is empty)."""
    dist = spec.distance
    return min((dist(s, t) for s in S for t in T), default=None)


def tree_hull(spec: FreeGroup, S) -> set:
    """Smallest connected subset of a free group containing ``S``."""
    S = list(S)
    if not S:
        return set()
    base = S[0]
    hull = {base}
    inv_base = spec.inverse(base)
    for g in S[1:]:
        # Walk the unique geodesic from base to g via the word of g base^-1.
        w = spec.multiply(g, inv_base)
        cur = base
        for c in reversed(w):
            cur = spec.multiply(c, cur)
            hull.add(cur)
    return hull


def geodesic(spec: FreeGroup, g, h) -> list:
    """Vertices on the unique geodesic from ``g`` to ``h`` (inclusive)."""
    w = spec.multiply(h, spec.inverse(g))
    path, cur = [g], g
    for c in reversed(w):
        cur = spec.multiply(c, cur)
        path.append(cur)
    return path
