"""Slow, independent reference implementations used to cross-check the library.

Nothing here calls into the code under test except for element
arithmetic on the groups themselves.
"""

from __future__ import annotations

import itertools

import networkx as nx

LETTERS = ("a", "b", "A", "B")
INV = {"a": "A", "A": "a", "b": "B", "B": "b"}


def reduce_word(w: str) -> str:
    out: list[str] = []
    for c in w:
        if out and out[-1] == INV[c]:
            out.pop()
        else:
            out.append(c)
    return "".join(out)


def free_ball(radius: int) -> set[str]:
    """All reduced words of length <= radius, by brute concatenation."""
    words = {""}
    for _ in range(radius):
        words |= {reduce_word(c + w) for w in words for c in LETTERS}
    return words


def cayley_graph(vertices, neighbors) -> nx.Graph:
    G = nx.Graph()
    vs = set(vertices)
    G.add_nodes_from(vs)
    for v in vs:
        for w in neighbors(v):
            if w in vs:
                G.add_edge(v, w)
    return G


def bfs_distances(vertices, neighbors, source) -> dict:
    return nx.single_source_shortest_path_length(cayley_graph(vertices, neighbors), source)


def components_nx(vertices, neighbors) -> list[set]:
    return [set(c) for c in nx.connected_components(cayley_graph(vertices, neighbors))]


# -- spaced sets ------------------------------------------------------------------


def spaced_pairwise(S, U, mul, inv) -> bool:
    """No ordered pair ``g != h`` of ``S`` with ``h g^-1`` in ``U``."""
    S = list(S)
    U = set(U)
    return all(mul(h, inv(g)) not in U for g in S for h in S if g != h)


def maximal_in(S, U, window, mul, inv) -> bool:
    S = set(S)
    return all(w in S or not spaced_pairwise(S | {w}, U, mul, inv) for w in window)


# -- two-arrow shift --------------------------------------------------------------


def arrow_targets(g: str, pair) -> list[str]:
    return [reduce_word(pair[0] + g), reduce_word(pair[1] + g)]


def pdox_valid_quadratic(arrows: dict) -> bool:
    """Compare every (slot, cell) against every other one."""
    slots = [(i, g) for g in arrows for i in (0, 1)]
    for (i, g), (j, h) in itertools.combinations(slots, 2):
        if arrow_targets(g, arrows[g])[i] == arrow_targets(h, arrows[h])[j]:
            return False
    return True


_UNORDERED = list(itertools.combinations(LETTERS, 2))


def pdox_feasible_exhaustive(fixed: dict, cells) -> bool:
    """Backtracking over every arrow pair of every free cell."""
    used = set()
    for g, pair in fixed.items():
        for t in arrow_targets(g, pair):
            if t in used:
                return False
            used.add(t)
    free = sorted((g for g in cells if g not in fixed), key=lambda w: (len(w), w))

    def rec(i: int) -> bool:
        if i == len(free):
            return True
        g = free[i]
        for pair in _UNORDERED:
            ts = arrow_targets(g, pair)
            if ts[0] in used or ts[1] in used:
                continue
            used.update(ts)
            if rec(i + 1):
                return True
            used.difference_update(ts)
        return False

    return rec(0)


def pdox_all_extensions(fixed: dict, cells) -> list[dict]:
    """Every valid completion (unordered pairs, sorted letters) on tiny windows."""
    out = []
    free = sorted((g for g in cells if g not in fixed), key=lambda w: (len(w), w))
    for choice in itertools.product(_UNORDERED, repeat=len(free)):
        arrows = dict(fixed)
        arrows.update(zip(free, choice))
        if pdox_valid_quadratic(arrows):
            out.append(arrows)
    return out


# -- colorings --------------------------------------------------------------------


def proper_coloring(values: dict, D, mul) -> bool:
    return all(
        values.get(mul(d, g)) != c for g, c in values.items() for d in D if mul(d, g) != g
    )
