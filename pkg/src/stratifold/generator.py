"""Rewriting operations O1, O1*, O2 and replayable build sequences.

* O1 splits a white vertex ``w``: the first ``k`` of its edges stay on ``w``,
  the rest move to a new white, and a new 1-1-1 black joins ``w``, the new
  white and a fresh terminal white.
* O1* joins two disjoint graphs at a white of each through a new 1-1-1 black
  that also carries a fresh terminal white.
* O2 hangs ``w -(2)- b -(1)- t`` on a white ``w``.

A :class:`BuildSequence` lists starting single-white graphs and the steps
applied to them, recording every fresh id, so replay is exact.
"""

from __future__ import annotations

import itertools
import random
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, Union

from .canon import part_code
from .graph import (
    GraphError,
    StratifoldGraph,
    components,
    disjoint_union,
    fresh_ids,
    require_tree,
    single_white,
)
from .homology import PreconditionViolated


class SequenceError(ValueError):
    pass


class NotSimplyConnectedError(ValueError):
    def __init__(self, verdict):
        super().__init__(f"graph is not simply connected: {verdict.describe()}")
        self.verdict = verdict


@dataclass(frozen=True)
class O1:
    white: str
    k: int
    moved: tuple[str, ...]
    black: str
    split: str
    tip: str

    def line(self) -> str:
        moved = "".join(f" {b}" for b in self.moved)
        return f"O1 {self.white} {self.k}{moved} -> {self.black} {self.split} {self.tip}"

    @property
    def fresh(self) -> tuple[str, ...]:
        return (self.black, self.split, self.tip)


@dataclass(frozen=True)
class O1Star:
    anchor_a: str
    anchor_b: str
    black: str
    tip: str

    def line(self) -> str:
        return f"O1* {self.anchor_a} {self.anchor_b} -> {self.black} {self.tip}"

    @property
    def fresh(self) -> tuple[str, ...]:
        return (self.black, self.tip)


@dataclass(frozen=True)
class O2:
    white: str
    black: str
    tip: str

    def line(self) -> str:
        return f"O2 {self.white} -> {self.black} {self.tip}"

    @property
    def fresh(self) -> tuple[str, ...]:
        return (self.black, self.tip)


Step = Union[O1, O1Star, O2]


@dataclass(frozen=True)
class BuildSequence:
    starts: tuple[str, ...] = ("w0",)
    steps: tuple[Step, ...] = ()

    def __len__(self) -> int:
        return len(self.steps)

    def serialize(self) -> str:
        lines = ["buildseq v1", "start " + " ".join(self.starts)]
        lines += [s.line() for s in self.steps]
        return "\n".join(lines) + "\n"


def parse_sequence(text: str) -> BuildSequence:
    lines = [
        (n, raw.split("#", 1)[0].split())
        for n, raw in enumerate(text.splitlines(), start=1)
    ]
    lines = [(n, toks) for n, toks in lines if toks]
    if not lines or lines[0][1] != ["buildseq", "v1"]:
        raise SequenceError("line 1: expected header 'buildseq v1'")
    if len(lines) < 2 or lines[1][1][0] != "start" or len(lines[1][1]) < 2:
        raise SequenceError("line 2: expected 'start <white-id>...'")
    starts = tuple(lines[1][1][1:])
    steps: list[Step] = []
    for n, toks in lines[2:]:
        if "->" not in toks:
            raise SequenceError(f"line {n}: missing '->' before fresh ids")
        cut = toks.index("->")
        head, fresh = toks[:cut], toks[cut + 1 :]
        op = head[0]
        try:
            if op == "O1" and len(head) >= 3 and len(fresh) == 3:
                steps.append(O1(head[1], int(head[2]), tuple(head[3:]), *fresh))
            elif op == "O1*" and len(head) == 3 and len(fresh) == 2:
                steps.append(O1Star(head[1], head[2], *fresh))
            elif op == "O2" and len(head) == 2 and len(fresh) == 2:
                steps.append(O2(head[1], *fresh))
            else:
                raise SequenceError(f"line {n}: malformed {op} record")
        except ValueError as exc:
            if isinstance(exc, SequenceError):
                raise
            raise SequenceError(f"line {n}: {exc}") from None
    return BuildSequence(starts, tuple(steps))


# -- operations ----------------------------------------------------------


def _require_white(g: StratifoldGraph, w: str) -> None:
    if w not in g:
        raise GraphError(f"unknown vertex {w!r}")
    if not g.is_white(w):
        raise GraphError(f"{w!r} is a black vertex, expected white")


def _require_fresh(g: StratifoldGraph, ids: Iterable[str]) -> None:
    ids = list(ids)
    if len(set(ids)) != len(ids):
        raise GraphError(f"fresh ids repeat: {ids}")
    for v in ids:
        if v in g:
            raise GraphError(f"fresh id {v!r} already in use")


def _apply_o1(g: StratifoldGraph, step: O1) -> StratifoldGraph:
    _require_white(g, step.white)
    _require_fresh(g, step.fresh)
    at_w = Counter(e.black for e in g.incident(step.white))
    want = Counter(step.moved)
    if any(at_w[b] < n for b, n in want.items()):
        raise SequenceError(f"O1 at {step.white}: moved edge list {step.moved} is not at that white")
    if step.k + len(step.moved) != g.degree(step.white):
        raise SequenceError(
            f"O1 at {step.white}: k={step.k} plus {len(step.moved)} moved edges != degree {g.degree(step.white)}"
        )
    removed = []
    added = []
    for e in g.incident(step.white):
        if want[e.black]:
            want[e.black] -= 1
            removed.append(e)
            added.append((step.split, e.black, e.label))
    added += [(step.white, step.black, 1), (step.split, step.black, 1), (step.tip, step.black, 1)]
    return g.with_changes(
        add_whites={step.split: 0, step.tip: 0},
        add_blacks=[step.black],
        add_edges=added,
        remove_edges=removed,
    )


def _apply_o2(g: StratifoldGraph, step: O2) -> StratifoldGraph:
    _require_white(g, step.white)
    _require_fresh(g, step.fresh)
    return g.with_changes(
        add_whites={step.tip: 0},
        add_blacks=[step.black],
        add_edges=[(step.white, step.black, 2), (step.tip, step.black, 1)],
    )


def _apply_o1_star(g: StratifoldGraph, step: O1Star) -> StratifoldGraph:
    _require_white(g, step.anchor_a)
    _require_white(g, step.anchor_b)
    _require_fresh(g, step.fresh)
    return g.with_changes(
        add_whites={step.tip: 0},
        add_blacks=[step.black],
        add_edges=[(step.anchor_a, step.black, 1), (step.anchor_b, step.black, 1), (step.tip, step.black, 1)],
    )


def op1(g: StratifoldGraph, w: str, k: int, fresh: tuple[str, str, str] | None = None) -> StratifoldGraph:
    """Split ``w``: its first ``k`` edges stay, the others move to a new white.

    ``fresh`` gives the (black, split white, terminal white) ids; by default
    the smallest unused ``o1b<n>`` / ``o1w<n>`` names are taken.
    """
    _require_white(g, w)
    m = g.degree(w)
    if not 0 <= k <= m:
        raise ValueError(f"k={k} out of range 0..{m} for white {w}")
    if fresh is None:
        taken = set(g.vertices)
        fresh = (fresh_ids(taken, "o1b", 1)[0], *fresh_ids(taken, "o1w", 2))
    moved = tuple(e.black for e in g.incident(w)[k:])
    return _apply_o1(g, O1(w, k, moved, *fresh))


def op1_star(
    g1: StratifoldGraph,
    w1: str,
    g2: StratifoldGraph,
    w2: str,
    fresh: tuple[str, str] | None = None,
) -> StratifoldGraph:
    """Join ``g1`` and ``g2`` at whites ``w1`` and ``w2`` through a new 1-1-1 black."""
    _require_white(g1, w1)
    _require_white(g2, w2)
    union = disjoint_union(g1, g2)
    if fresh is None:
        taken = set(union.vertices)
        fresh = (fresh_ids(taken, "o1sb", 1)[0], fresh_ids(taken, "o1sw", 1)[0])
    return _apply_o1_star(union, O1Star(w1, w2, *fresh))


def op2(g: StratifoldGraph, w: str, fresh: tuple[str, str] | None = None) -> StratifoldGraph:
    """Attach ``w -(2)- b -(1)- t`` with fresh ``b`` and terminal ``t``."""
    _require_white(g, w)
    if fresh is None:
        taken = set(g.vertices)
        fresh = (fresh_ids(taken, "o2b", 1)[0], fresh_ids(taken, "o2w", 1)[0])
    return _apply_o2(g, O2(w, *fresh))


# -- replay --------------------------------------------------------------


class _Forest:
    """Union-find over vertex ids tracking the build level of each part."""

    def __init__(self, starts: Iterable[str]):
        self.parent: dict[str, str] = {}
        self.level: dict[str, int] = {}
        for s in starts:
            self.add(s)

    def add(self, v: str, like: str | None = None) -> None:
        if like is None:
            self.parent[v] = v
            self.level[v] = 0
        else:
            self.parent[v] = self.find(like)

    def find(self, v: str) -> str:
        root = v
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[v] != root:
            self.parent[v], v = root, self.parent[v]
        return root

    def join(self, a: str, b: str) -> str:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            raise SequenceError(f"O1* anchors {a} and {b} are already in one component")
        self.parent[rb] = ra
        self.level[ra] = 1 + max(self.level[ra], self.level[rb])
        return ra


def _walk(seq: BuildSequence, build: bool):
    if not seq.starts:
        raise SequenceError("sequence has no starting vertex")
    if len(set(seq.starts)) != len(seq.starts):
        raise SequenceError("starting vertices repeat")
    forest = _Forest(seq.starts)
    g = StratifoldGraph({s: 0 for s in seq.starts}) if build else None
    known = set(seq.starts)
    for i, step in enumerate(seq.steps, start=1):
        anchors = (step.anchor_a, step.anchor_b) if isinstance(step, O1Star) else (step.white,)
        for a in anchors:
            if a not in known:
                raise SequenceError(f"step {i}: dangling anchor {a!r}")
        for v in step.fresh:
            if v in known:
                raise SequenceError(f"step {i}: fresh id {v!r} already in use")
        if isinstance(step, O1Star):
            forest.join(step.anchor_a, step.anchor_b)
        for v in step.fresh:
            forest.add(v, like=anchors[0])
            known.add(v)
        if build:
            try:
                if isinstance(step, O1):
                    g = _apply_o1(g, step)
                elif isinstance(step, O2):
                    g = _apply_o2(g, step)
                else:
                    g = _apply_o1_star(g, step)
            except (GraphError, SequenceError) as exc:
                raise SequenceError(f"step {i}: {exc}") from None
    roots = {forest.find(s) for s in seq.starts}
    if len(roots) != 1:
        raise SequenceError(f"sequence leaves {len(roots)} components; O1* must join them all")
    return g, forest.level[roots.pop()]


def replay(seq: BuildSequence) -> StratifoldGraph:
    return _walk(seq, build=True)[0]


def level(seq: BuildSequence) -> int:
    """Nesting depth of O1* joins: the least n this sequence witnesses membership in G_n for."""
    return _walk(seq, build=False)[1]


# -- deconstruction ------------------------------------------------------


def _pendant_candidates(g: StratifoldGraph):
    for w in g.whites:
        if g.degree(w) != 1:
            continue
        e = g.incident(w)[0]
        if e.label == 1:
            yield w, e.black


def _deconstruct(g: StratifoldGraph) -> tuple[list[str], list[Step]]:
    if not g.blacks:
        (only,) = g.whites
        return [only], []
    best = None
    for w, b in _pendant_candidates(g):
        pattern = g.labels_at(b)
        blocked = {w, b}
        if pattern == (1, 2):
            anchor = next(e.white for e in g.incident(b) if e.label == 2)
            key = (0, (part_code(g, anchor, blocked),), w)
            plan = ("O2", b, w, anchor)
        elif pattern == (1, 1, 1):
            anchors = sorted(
                (part_code(g, e.white, blocked), e.white) for e in g.incident(b) if e.white != w
            )
            key = (1, tuple(c for c, _ in anchors), w)
            plan = ("O1*", b, w, [a for _, a in anchors])
        else:
            continue
        if best is None or key < best[0]:
            best = (key, plan)
    if best is None:
        raise RuntimeError("simply connected graph without a terminal label-1 edge")
    kind, b, w, anchor = best[1]
    rest = g.with_changes(remove_vertices=[w, b])
    if kind == "O2":
        starts, steps = _deconstruct(rest)
        return starts, steps + [O2(anchor, b, w)]
    a1, a2 = anchor
    parts = {v: p for p in components(rest) for v in (a1, a2) if v in p}
    s1, t1 = _deconstruct(parts[a1])
    s2, t2 = _deconstruct(parts[a2])
    return s1 + s2, t1 + t2 + [O1Star(a1, a2, b, w)]


def deconstruct_unchecked(g: StratifoldGraph) -> BuildSequence:
    """Build sequence for a graph already known to be simply connected.

    Peels a terminal white on a label-1 edge; its black is either 1-2 (undo of
    O2) or 1-1-1 (undo of O1*, splitting the graph in two). Among candidates
    the one whose residual has the smallest canonical code is taken.
    """
    starts, steps = _deconstruct(g)
    return BuildSequence(tuple(starts), tuple(steps))


def deconstruct(g: StratifoldGraph) -> BuildSequence:
    from .classifier import classify

    verdict = classify(g)
    if not verdict.simply_connected:
        raise NotSimplyConnectedError(verdict)
    return deconstruct_unchecked(g)


# -- all-label-1 trees ---------------------------------------------------


def _rebuild_ones(g: StratifoldGraph, w: str, extra: int) -> list[O1]:
    if not g.blacks:
        return []
    b = g.incident(w)[0].black
    others = sorted(e.white for e in g.incident(b) if e.white != w)
    parts = {p_w: p for p in components(g.with_changes(remove_vertices=[b])) for p_w in p.whites}
    home = parts[w]
    steps = _rebuild_ones(home, w, extra)
    steps.append(O1(w, home.degree(w) + extra, (), b, others[0], others[1]))
    for x in others:
        steps += _rebuild_ones(parts[x], x, 1)
    return steps


def rebuild_all_ones(g: StratifoldGraph, w: str) -> BuildSequence:
    """O1-only build sequence growing an all-label-1 tree from its white ``w``."""
    require_tree(g)
    _require_white(g, w)
    if any(e.label != 1 for e in g.edges):
        raise PreconditionViolated("all edge labels must be 1")
    if any(genus != 0 for genus in g.whites.values()):
        raise PreconditionViolated("all whites must have genus 0")
    if any(g.degree(b) != 3 for b in g.blacks):
        raise PreconditionViolated("every black must have three label-1 edges")
    return BuildSequence((w,), tuple(_rebuild_ones(g, w, 0)))


# -- constructions from ordinary trees -----------------------------------


def _tree_adjacency(tree, nodes=None) -> dict[str, list[str]]:
    if hasattr(tree, "adj"):
        nodes = list(tree.nodes) if nodes is None else nodes
        edges = list(tree.edges)
    else:
        edges = list(tree)
    adj: dict[str, list[str]] = {str(v): [] for v in (nodes or [])}
    for u, v in edges:
        u, v = str(u), str(v)
        adj.setdefault(u, []).append(v)
        adj.setdefault(v, []).append(u)
    if not adj:
        raise ValueError("tree has no vertices")
    if sum(len(n) for n in adj.values()) // 2 != len(adj) - 1:
        raise ValueError("input is not a tree")
    seen = {next(iter(adj))}
    stack = list(seen)
    while stack:
        for u in adj[stack.pop()]:
            if u not in seen:
                seen.add(u)
                stack.append(u)
    if len(seen) != len(adj):
        raise ValueError("input is not a tree")
    for v in adj:
        adj[v].sort()
    return adj


def horned_tree_from_tree(tree) -> StratifoldGraph:
    """Horned tree of a tree whose non-leaf vertices all have degree 3.

    Leaves become terminal whites and inner vertices degree-3 blacks; edges to
    leaves are trisected (``m.<x>.<leaf>`` white, ``h.<leaf>`` black) and inner
    edges bisected by a white ``m.<x>.<y>``.
    """
    adj = _tree_adjacency(tree)
    inner = [v for v, n in adj.items() if len(n) > 1]
    if not inner:
        raise ValueError("tree needs at least one vertex of degree 3")
    bad = [v for v in inner if len(adj[v]) != 3]
    if bad:
        raise ValueError(f"non-leaf vertex {bad[0]} has degree {len(adj[bad[0]])}, expected 3")
    whites: dict[str, int] = {}
    blacks = list(inner)
    edges = []
    for x in sorted(inner):
        for y in adj[x]:
            if len(adj[y]) == 1:
                mid, tail = f"m.{x}.{y}", f"h.{y}"
                whites[y] = 0
                whites[mid] = 0
                blacks.append(tail)
                edges += [(mid, x, 1), (mid, tail, 1), (y, tail, 2)]
            elif x < y:
                mid = f"m.{x}.{y}"
                whites[mid] = 0
                edges += [(mid, x, 1), (mid, y, 1)]
    return StratifoldGraph(whites, blacks, edges)


def collapsible_from_rooted_tree(tree, root, nodes=None) -> StratifoldGraph:
    """Barycentric subdivision of ``tree`` labeled 2 toward ``root`` and 1 away.

    Vertices of the tree become whites; the barycenter of edge ``(p, c)``, with
    ``p`` nearer the root, is the black ``s.<p>.<c>``.
    """
    root = str(root)
    adj = _tree_adjacency(tree, nodes if nodes is not None else [root])
    if root not in adj:
        raise ValueError(f"root {root!r} is not a vertex of the tree")
    whites = {v: 0 for v in adj}
    blacks = []
    edges = []
    seen = {root}
    queue = [root]
    for p in queue:
        for c in adj[p]:
            if c in seen:
                continue
            seen.add(c)
            queue.append(c)
            bary = f"s.{p}.{c}"
            blacks.append(bary)
            edges += [(p, bary, 2), (c, bary, 1)]
    return StratifoldGraph(whites, blacks, edges)


# -- random generation ---------------------------------------------------

DEFAULT_WEIGHTS = {"O1": 1.0, "O1*": 1.0, "O2": 1.0}


def random_simply_connected(
    seed: int,
    steps: int,
    weights: Mapping[str, float] | None = None,
) -> tuple[StratifoldGraph, BuildSequence]:
    """Random member of the family generated by O1, O1* and O2.

    Exactly ``steps`` operations are applied. An O1* step splits the remaining
    budget at random between two independently grown graphs. Deterministic in
    ``seed``.
    """
    if steps < 0:
        raise ValueError("steps must be >= 0")
    weights = dict(DEFAULT_WEIGHTS if weights is None else weights)
    ops = sorted(weights)
    rng = random.Random(seed)
    counter = itertools.count()

    def new(prefix: str) -> str:
        return f"{prefix}{next(counter)}"

    def grow(n: int) -> tuple[StratifoldGraph, list[str], list[Step]]:
        if n == 0:
            w = new("w")
            return single_white(w), [w], []
        op = rng.choices(ops, [weights[o] for o in ops])[0]
        if op == "O1*":
            left = rng.randint(0, n - 1)
            g1, s1, t1 = grow(left)
            g2, s2, t2 = grow(n - 1 - left)
            step = O1Star(rng.choice(list(g1.whites)), rng.choice(list(g2.whites)), new("b"), new("w"))
            g = _apply_o1_star(disjoint_union(g1, g2), step)
            return g, s1 + s2, t1 + t2 + [step]
        g, s, t = grow(n - 1)
        w = rng.choice(list(g.whites))
        if op == "O1":
            k = rng.randint(0, g.degree(w))
            moved = tuple(e.black for e in g.incident(w)[k:])
            step = O1(w, k, moved, new("b"), new("w"), new("w"))
            g = _apply_o1(g, step)
        elif op == "O2":
            step = O2(w, new("b"), new("w"))
            g = _apply_o2(g, step)
        else:
            raise ValueError(f"unknown operation {op!r}")
        return g, s, t + [step]

    g, starts, seq_steps = grow(steps)
    return g, BuildSequence(tuple(starts), tuple(seq_steps))
