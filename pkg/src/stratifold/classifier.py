"""Structural decision procedure for simply connected trivalent graphs.

The graph is cut at its degree-3 black vertices. Each remaining piece must be
a barycentric subdivision of a rooted tree labeled 2/1 by parity of distance
from its root ("collapsible"). The closed star of the degree-3 blacks, with a
1-2 tail hung on every non-root white, is the reduced graph; the input is
simply connected exactly when the reduced graph contains no horned tree.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping

from .canon import rooted_code
from .graph import (
    Edge,
    GraphError,
    StratifoldGraph,
    components,
    delete_open_star,
    find_cycle,
    fresh_id,
    require_tree,
    trivalency_violations,
    validate_structure,
)
from .homology import NotTrivalentError, PreconditionViolated


@dataclass(frozen=True)
class NotCollapsible:
    rule: str
    vertex: str
    detail: str = ""

    def __str__(self) -> str:
        return f"{self.rule} at {self.vertex}" + (f": {self.detail}" if self.detail else "")


class NotCollapsibleError(ValueError):
    def __init__(self, failure: NotCollapsible, component: StratifoldGraph | None = None):
        super().__init__(str(failure))
        self.failure = failure
        self.component = component


def collapsible_root(c: StratifoldGraph) -> str:
    """Root of a collapsible tree, or NotCollapsibleError naming the broken rule."""
    require_tree(c)
    for w, genus in c.whites.items():
        if genus != 0:
            raise NotCollapsibleError(NotCollapsible("white-genus", w, f"genus {genus}"), c)
    if not c.blacks:
        return next(iter(c.whites))
    for b in c.blacks:
        if c.degree(b) != 2:
            raise NotCollapsibleError(
                NotCollapsible("black-degree", b, f"degree {c.degree(b)}, expected 2"), c
            )
        if c.labels_at(b) != (1, 2):
            raise NotCollapsibleError(
                NotCollapsible("black-labels", b, f"labels {c.labels_at(b)}, expected (1, 2)"), c
            )
    free = []
    for w in c.whites:
        ones = sum(1 for e in c.incident(w) if e.label == 1)
        if ones > 1:
            raise NotCollapsibleError(
                NotCollapsible("white-label-1", w, f"{ones} incident label-1 edges, at most 1 allowed"), c
            )
        if ones == 0:
            free.append(w)
    if len(free) != 1:
        raise NotCollapsibleError(
            NotCollapsible("root-count", min(free or c.whites), f"{len(free)} whites without a label-1 edge"), c
        )
    root = free[0]
    # the edge leaving a vertex at distance d from the root carries 2 if d is even
    depth = {root: 0}
    queue = deque([root])
    while queue:
        v = queue.popleft()
        for e in c.incident(v):
            u = e.black if v == e.white else e.white
            if u in depth:
                continue
            want = 2 if depth[v] % 2 == 0 else 1
            if e.label != want:
                raise NotCollapsibleError(
                    NotCollapsible("parity", u, f"edge {v}-{u} has label {e.label}, expected {want}"), c
                )
            depth[u] = depth[v] + 1
            queue.append(u)
    return root


@dataclass(frozen=True)
class Component:
    graph: StratifoldGraph
    root: str


@dataclass(frozen=True)
class StarWhite:
    edges: tuple[Edge, ...]
    is_root: bool


@dataclass(frozen=True)
class Decomposition:
    B: tuple[str, ...]
    components: tuple[Component, ...]
    star_map: Mapping[str, StarWhite] = field(default_factory=dict)

    @property
    def roots(self) -> frozenset[str]:
        return frozenset(c.root for c in self.components)


def _require_preconditions(g: StratifoldGraph) -> None:
    offending = trivalency_violations(g)
    if offending:
        raise NotTrivalentError(offending)
    require_tree(g)
    for w, genus in g.whites.items():
        if genus != 0:
            raise PreconditionViolated(f"white {w} has genus {genus}")
    for b in g.blacks:
        if g.degree(b) == 1:
            raise PreconditionViolated(f"black {b} is terminal")


def decompose(g: StratifoldGraph) -> Decomposition:
    """Cut at the degree-3 blacks and recognize every piece as collapsible."""
    _require_preconditions(g)
    big = tuple(b for b in g.blacks if g.degree(b) == 3)
    parts = []
    root_of: dict[str, str] = {}
    for piece in delete_open_star(g, big):
        try:
            root = collapsible_root(piece)
        except NotCollapsibleError as exc:
            raise NotCollapsibleError(exc.failure, piece) from None
        parts.append(Component(piece, root))
        for v in piece.whites:
            root_of[v] = root
    star_map = {}
    big_set = set(big)
    star_whites = sorted({e.white for b in big for e in g.incident(b)})
    for w in star_whites:
        edges = tuple(e for e in g.incident(w) if e.black in big_set)
        star_map[w] = StarWhite(edges, root_of[w] == w)
    return Decomposition(big, tuple(parts), star_map)


def reduced_graph(g: StratifoldGraph, d: Decomposition) -> StratifoldGraph:
    """Closed star of the degree-3 blacks plus a 1-2 tail at every non-root white.

    Tail vertices are named ``rb.<white>`` and ``rt.<white>`` (suffixed if those
    ids are taken).
    """
    taken = set(g.vertices)
    whites = {w: g.genus(w) for w in d.star_map}
    edges = [e for b in d.B for e in g.incident(b)]
    blacks = list(d.B)
    for w, info in d.star_map.items():
        if info.is_root:
            continue
        tb = f"rb.{w}" if f"rb.{w}" not in taken else fresh_id(taken, f"rb.{w}.")
        taken.add(tb)
        tt = f"rt.{w}" if f"rt.{w}" not in taken else fresh_id(taken, f"rt.{w}.")
        taken.add(tt)
        blacks.append(tb)
        whites[tt] = 0
        edges += [(w, tb, 1), (tt, tb, 2)]
    return StratifoldGraph(whites, blacks, edges)


@dataclass(frozen=True)
class HornedWitness:
    graph: StratifoldGraph
    host: StratifoldGraph

    def vertex_map(self) -> list[tuple[str, str]]:
        """(witness id, host id) pairs; the witness is a subgraph, so ids agree."""
        return [(v, v) for v in sorted(self.graph.vertices)]


def _strip_label1_terminals(r: StratifoldGraph) -> set[str]:
    """Repeatedly delete the black of any terminal label-1 edge; return deleted blacks."""
    degree = {v: r.degree(v) for v in r.vertices}
    gone: set[str] = set()

    def live_edge(w: str) -> Edge | None:
        live = [e for e in r.incident(w) if e.black not in gone]
        return live[0] if len(live) == 1 else None

    queue = deque(sorted(w for w in r.whites if degree[w] == 1))
    while queue:
        w = queue.popleft()
        if degree[w] != 1:
            continue
        e = live_edge(w)
        if e is None or e.label != 1:
            continue
        gone.add(e.black)
        for f in r.incident(e.black):
            degree[f.white] -= 1
            if degree[f.white] == 1:
                queue.append(f.white)
    return gone


def _extract_horned(c: StratifoldGraph) -> StratifoldGraph:
    """Keep two branches at each white of degree >= 3 until none remain.

    Branches are ranked by ``<edge label><rooted code>``; the two smallest stay.
    """
    while True:
        wide = [w for w in c.whites if c.degree(w) >= 3]
        if not wide:
            return c
        w = wide[0]
        ranked = sorted(
            (f"{e.label}{rooted_code(c, e.black, w)}", e.black) for e in c.incident(w)
        )
        doomed: set[str] = set()
        for _, x in ranked[2:]:
            seen = {w, x}
            stack = [x]
            while stack:
                v = stack.pop()
                for u in c.neighbors(v):
                    if u not in seen:
                        seen.add(u)
                        stack.append(u)
            doomed |= seen - {w}
        c = c.with_changes(remove_vertices=doomed)


def horned_search(r: StratifoldGraph) -> HornedWitness | None:
    """Find a horned tree in a reduced graph, or return None if it has none.

    Terminal label-1 edges are stripped (deleting their black vertex) until none
    are left. A surviving piece that still has a degree-3 black has only
    label-2 terminal edges, and trimming it to two branches at every wide white
    leaves a horned tree.
    """
    if len(r) == 0:
        return None
    gone = _strip_label1_terminals(r)
    rest = r.with_changes(remove_vertices=gone)
    for piece in components(rest):
        if any(piece.degree(b) == 3 for b in piece.blacks):
            return HornedWitness(_extract_horned(piece), r)
    return None


def verify_horned(h: StratifoldGraph) -> bool:
    require_tree(h)
    terminal = {v for v in h.vertices if h.degree(v) == 1}
    for b in h.blacks:
        near_leaf = any(w in terminal for w in h.neighbors(b))
        if h.degree(b) != (2 if near_leaf else 3):
            return False
    for w in h.whites:
        if w not in terminal and h.degree(w) != 2:
            return False
    for e in h.edges:
        is_terminal = e.white in terminal or e.black in terminal
        if e.label != (2 if is_terminal else 1):
            return False
    return any(h.degree(v) == 3 for v in h.vertices)


class Kind(str, Enum):
    SIMPLY_CONNECTED = "simply-connected"
    NOT_TREE = "not-tree"
    GENUS_NONZERO = "genus-nonzero"
    TERMINAL_BLACK = "terminal-black"
    NON_COLLAPSIBLE = "non-collapsible-component"
    HORNED_TREE = "horned-tree"


@dataclass(frozen=True)
class Verdict:
    """Outcome of :func:`classify`.

    ``witness`` depends on ``kind``: the cycle's vertex ids, the offending white
    or black id, a :class:`NotCollapsible`, or a :class:`HornedWitness`.
    """

    kind: Kind
    decomposition: Decomposition | None = None
    reduced: StratifoldGraph | None = None
    certificate: object | None = None
    witness: object | None = None
    component: StratifoldGraph | None = None

    @property
    def simply_connected(self) -> bool:
        return self.kind is Kind.SIMPLY_CONNECTED

    def describe(self) -> str:
        if self.simply_connected:
            return self.kind.value
        w = self.witness
        if isinstance(w, HornedWitness):
            where = f"{len(w.graph.blacks)} blacks, {len(w.graph.whites)} whites"
        elif isinstance(w, tuple):
            where = "cycle " + "-".join(w)
        else:
            where = str(w)
        return f"obstruction: {self.kind.value} ({where})"


def classify(g: StratifoldGraph, certificate: bool = False) -> Verdict:
    """Classify a connected trivalent graph.

    Checks run in a fixed order and the first failure is reported: cycle,
    nonzero genus, terminal black, non-collapsible piece, horned tree. With
    ``certificate=True`` a simply connected verdict carries a build sequence.
    """
    problems = validate_structure(g)
    if problems:
        raise GraphError("; ".join(str(p) for p in problems))
    offending = trivalency_violations(g)
    if offending:
        raise NotTrivalentError(offending)
    cycle = find_cycle(g)
    if cycle is not None:
        return Verdict(Kind.NOT_TREE, witness=tuple(cycle))
    for w, genus in g.whites.items():
        if genus != 0:
            return Verdict(Kind.GENUS_NONZERO, witness=w)
    for b in g.blacks:
        if g.degree(b) == 1:
            return Verdict(Kind.TERMINAL_BLACK, witness=b)
    try:
        d = decompose(g)
    except NotCollapsibleError as exc:
        return Verdict(Kind.NON_COLLAPSIBLE, witness=exc.failure, component=exc.component)
    r = reduced_graph(g, d)
    horned = horned_search(r)
    if horned is not None:
        return Verdict(Kind.HORNED_TREE, decomposition=d, reduced=r, witness=horned)
    seq = None
    if certificate:
        from .generator import deconstruct_unchecked

        seq = deconstruct_unchecked(g)
    return Verdict(Kind.SIMPLY_CONNECTED, decomposition=d, reduced=r, certificate=seq)
