"""Shared graph builders and hypothesis strategies for the test suite."""

from __future__ import annotations

import random

import networkx as nx
from hypothesis import strategies as st

from stratifold import StratifoldGraph, parse

MINIMAL_HORNED = """\
w w1 0
w w2 0
w w3 0
w t1 0
w t2 0
w t3 0
b b0
b b1
b b2
b b3
e w1 b0 1
e w2 b0 1
e w3 b0 1
e w1 b1 1
e w2 b2 1
e w3 b3 1
e t1 b1 2
e t2 b2 2
e t3 b3 2
"""


def minimal_horned() -> StratifoldGraph:
    return parse(MINIMAL_HORNED)


def h_tree() -> nx.Graph:
    """Two adjacent degree-3 vertices with two leaves each."""
    return nx.Graph([("u", "v"), ("u", "a"), ("u", "b"), ("v", "c"), ("v", "d")])


# (label at host white, labels to the new terminal whites)
SHAPES = ((1, (2,)), (2, (1,)), (1, (1, 1)))
TERMINAL_SHAPE = (3, ())


def grow_tree(plan, terminal_blacks: bool = False) -> StratifoldGraph:
    """Trivalent tree grown by hanging one new black per ``(host, shape)`` pair.

    ``host`` is reduced modulo the current number of whites.
    """
    shapes = SHAPES + ((TERMINAL_SHAPE,) if terminal_blacks else ())
    whites = {"w0": 0}
    blacks: list[str] = []
    edges: list[tuple[str, str, int]] = []
    order = ["w0"]
    for host, shape in plan:
        host_label, leaf_labels = shapes[shape % len(shapes)]
        w = order[host % len(order)]
        b = f"b{len(blacks)}"
        blacks.append(b)
        edges.append((w, b, host_label))
        for lab in leaf_labels:
            t = f"w{len(order)}"
            order.append(t)
            whites[t] = 0
            edges.append((t, b, lab))
    return StratifoldGraph(whites, blacks, edges)


def trivalent_trees(max_blacks: int = 8, terminal_blacks: bool = False):
    plan = st.lists(st.tuples(st.integers(0, 10_000), st.integers(0, 3)), max_size=max_blacks)
    return plan.map(lambda p: grow_tree(p, terminal_blacks))


def relabel(g: StratifoldGraph, mapping: dict[str, str]) -> StratifoldGraph:
    return StratifoldGraph(
        {mapping[w]: genus for w, genus in g.whites.items()},
        [mapping[b] for b in g.blacks],
        [(mapping[e.white], mapping[e.black], e.label) for e in g.edges],
    )


def shuffled_ids(g: StratifoldGraph, rng: random.Random) -> StratifoldGraph:
    names = [f"x{i}" for i in range(len(g))]
    rng.shuffle(names)
    return relabel(g, dict(zip(sorted(g.vertices), names)))


def cubic_inner_tree(rng: random.Random, n_inner: int) -> nx.Graph:
    """Random tree whose non-leaf vertices all have degree 3."""
    t = nx.Graph()
    t.add_node(0)
    for i in range(1, n_inner):
        t.add_edge(i, rng.choice([v for v in t if t.degree(v) < 3]))
    leaf = n_inner
    for v in range(n_inner):
        while t.degree(v) < 3:
            t.add_edge(v, leaf)
            leaf += 1
    return t


def random_connected_subset(g: StratifoldGraph, rng: random.Random) -> set[str]:
    """Vertex set of a random connected subtree."""
    start = rng.choice(sorted(g.vertices))
    target = rng.randint(1, len(g))
    chosen = {start}
    frontier = set(g.neighbors(start))
    while frontier and len(chosen) < target:
        v = rng.choice(sorted(frontier))
        chosen.add(v)
        frontier |= set(g.neighbors(v))
        frontier -= chosen
    return chosen


def naive_rank(rows, p: int) -> int:
    """Fraction-free elimination over plain Python integers."""
    m = [[x % p for x in row] for row in rows]
    rank = 0
    cols = len(m[0]) if m else 0
    for c in range(cols):
        pivot = next((r for r in range(rank, len(m)) if m[r][c]), None)
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        a = m[rank][c]
        for r in range(len(m)):
            if r != rank and m[r][c]:
                f = m[r][c]
                m[r] = [(a * x - f * y) % p for x, y in zip(m[r], m[rank])]
        rank += 1
    return rank
