"""Labeled bicolored graphs of trivalent 2-stratifolds.

A graph has white vertices (carrying a genus, negative for nonorientable
surfaces), black vertices, and edges joining a white to a black vertex with a
positive integer label. Values are immutable; every operation returns a new
graph.
"""

from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, NamedTuple, Sequence


class GraphError(ValueError):
    """Raised for graphs that violate a model invariant."""


class GraphFormatError(GraphError):
    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class NotATreeError(GraphError):
    pass


class Edge(NamedTuple):
    white: str
    black: str
    label: int


TRIVALENT_PATTERNS = ((1, 1, 1), (1, 2), (3,))


class StratifoldGraph:
    """Bipartite labeled multigraph.

    ``whites`` maps white ids to genus, ``blacks`` is a collection of black ids
    and ``edges`` an iterable of ``(white, black, label)`` triples. Ids are
    unique across both colors.
    """

    __slots__ = ("_whites", "_blacks", "_edges", "_incident", "_hash")

    def __init__(
        self,
        whites: Mapping[str, int] | Iterable[tuple[str, int]] = (),
        blacks: Iterable[str] = (),
        edges: Iterable[tuple[str, str, int]] = (),
    ):
        white_map = dict(whites.items() if isinstance(whites, Mapping) else whites)
        black_list = list(blacks)
        black_set = set(black_list)
        if len(black_set) != len(black_list):
            dup = next(b for b, n in Counter(black_list).items() if n > 1)
            raise GraphError(f"duplicate black id {dup!r}")
        clash = black_set.intersection(white_map)
        if clash:
            raise GraphError(f"duplicate id {min(clash)!r} used for a white and a black vertex")
        for w, g in white_map.items():
            if not isinstance(g, int):
                raise GraphError(f"genus of white {w!r} must be an integer")

        incident: dict[str, list[Edge]] = {v: [] for v in white_map}
        incident.update((b, []) for b in black_list)
        edge_list = []
        for white, black, label in edges:
            if white not in white_map:
                if white in black_set:
                    raise GraphError(f"edge ({white}, {black}) must start at a white vertex")
                raise GraphError(f"edge endpoint {white!r} does not exist")
            if black not in black_set:
                if black in white_map:
                    raise GraphError(f"edge ({white}, {black}) joins two white vertices")
                raise GraphError(f"edge endpoint {black!r} does not exist")
            if not isinstance(label, int) or label < 1:
                raise GraphError(f"label < 1 on edge ({white}, {black})")
            edge_list.append(Edge(white, black, label))
        edge_list.sort()
        for e in edge_list:
            incident[e.white].append(e)
            incident[e.black].append(e)

        self._whites = MappingProxyType(dict(sorted(white_map.items())))
        self._blacks = tuple(sorted(black_list))
        self._edges = tuple(edge_list)
        self._incident = {v: tuple(es) for v, es in incident.items()}
        self._hash: int | None = None

    # -- accessors -------------------------------------------------------

    @property
    def whites(self) -> Mapping[str, int]:
        return self._whites

    @property
    def blacks(self) -> tuple[str, ...]:
        return self._blacks

    @property
    def edges(self) -> tuple[Edge, ...]:
        return self._edges

    @property
    def vertices(self) -> tuple[str, ...]:
        return tuple(self._whites) + self._blacks

    def __len__(self) -> int:
        return len(self._whites) + len(self._blacks)

    def __contains__(self, v: object) -> bool:
        return v in self._incident

    def is_white(self, v: str) -> bool:
        if v not in self._incident:
            raise GraphError(f"unknown vertex {v!r}")
        return v in self._whites

    def genus(self, w: str) -> int:
        return self._whites[w]

    def incident(self, v: str) -> tuple[Edge, ...]:
        """Edges at ``v`` in the graph's fixed (sorted) edge order."""
        try:
            return self._incident[v]
        except KeyError:
            raise GraphError(f"unknown vertex {v!r}") from None

    def degree(self, v: str) -> int:
        return len(self.incident(v))

    def neighbors(self, v: str) -> list[str]:
        if v in self._whites:
            return [e.black for e in self.incident(v)]
        return [e.white for e in self.incident(v)]

    def labels_at(self, b: str) -> tuple[int, ...]:
        """Partition of a black vertex: its sorted incident labels."""
        return tuple(sorted(e.label for e in self.incident(b)))

    def is_terminal(self, v: str) -> bool:
        return self.degree(v) == 1

    # -- value semantics -------------------------------------------------

    def _key(self):
        return (tuple(self._whites.items()), self._blacks, self._edges)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, StratifoldGraph):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self._key())
        return self._hash

    def __repr__(self) -> str:
        return (
            f"StratifoldGraph(whites={len(self._whites)}, blacks={len(self._blacks)}, "
            f"edges={len(self._edges)})"
        )

    # -- derived graphs --------------------------------------------------

    def with_changes(
        self,
        add_whites: Mapping[str, int] | None = None,
        add_blacks: Iterable[str] = (),
        add_edges: Iterable[tuple[str, str, int]] = (),
        remove_vertices: Iterable[str] = (),
        remove_edges: Iterable[tuple[str, str, int]] = (),
    ) -> StratifoldGraph:
        removed = set(remove_vertices)
        unknown = removed.difference(self._incident)
        if unknown:
            raise GraphError(f"unknown vertex {min(unknown)!r}")
        dropped = Counter(Edge(*e) for e in remove_edges)
        edges = []
        for e in self._edges:
            if dropped[e]:
                dropped[e] -= 1
                continue
            if e.white in removed or e.black in removed:
                continue
            edges.append(e)
        if any(dropped.values()):
            raise GraphError("cannot remove an edge that is not in the graph")
        whites = {w: g for w, g in self._whites.items() if w not in removed}
        if add_whites:
            whites.update(add_whites)
        blacks = [b for b in self._blacks if b not in removed]
        blacks.extend(add_blacks)
        edges.extend(add_edges)
        return StratifoldGraph(whites, blacks, edges)

    def subgraph(self, vertices: Iterable[str], edges: Iterable[tuple[str, str, int]] | None = None):
        """Subgraph on ``vertices``; induced unless ``edges`` is given."""
        keep = set(vertices)
        unknown = keep.difference(self._incident)
        if unknown:
            raise GraphError(f"unknown vertex {min(unknown)!r}")
        if edges is None:
            chosen = [e for e in self._edges if e.white in keep and e.black in keep]
        else:
            chosen = [Edge(*e) for e in edges]
            have = Counter(self._edges)
            for e in chosen:
                if have[e] == 0 or e.white not in keep or e.black not in keep:
                    raise GraphError(f"edge {tuple(e)} is not an edge of the subgraph's host")
                have[e] -= 1
        return StratifoldGraph(
            {w: g for w, g in self._whites.items() if w in keep},
            [b for b in self._blacks if b in keep],
            chosen,
        )


def disjoint_union(*graphs: StratifoldGraph) -> StratifoldGraph:
    whites: dict[str, int] = {}
    blacks: list[str] = []
    edges: list[Edge] = []
    seen: set[str] = set()
    for g in graphs:
        clash = seen.intersection(g.vertices)
        if clash:
            raise GraphError(f"graphs are not disjoint: id {min(clash)!r} appears twice")
        seen.update(g.vertices)
        whites.update(g.whites)
        blacks.extend(g.blacks)
        edges.extend(g.edges)
    return StratifoldGraph(whites, blacks, edges)


def fresh_id(taken, prefix: str) -> str:
    """Smallest ``prefix<n>`` not in ``taken``."""
    n = 0
    while f"{prefix}{n}" in taken:
        n += 1
    return f"{prefix}{n}"


def fresh_ids(taken, prefix: str, count: int) -> list[str]:
    taken = set(taken)
    out = []
    for _ in range(count):
        v = fresh_id(taken, prefix)
        taken.add(v)
        out.append(v)
    return out


# -- building blocks -----------------------------------------------------


def single_white(wid: str = "w0", genus: int = 0) -> StratifoldGraph:
    return StratifoldGraph({wid: genus})


def b12_tree() -> StratifoldGraph:
    """``w1 -(1)- b -(2)- w2``."""
    return StratifoldGraph({"w1": 0, "w2": 0}, ["b"], [("w1", "b", 1), ("w2", "b", 2)])


def b111_tree() -> StratifoldGraph:
    return StratifoldGraph(
        {"w1": 0, "w2": 0, "w3": 0}, ["b"], [("w1", "b", 1), ("w2", "b", 1), ("w3", "b", 1)]
    )


def path_graph(*items: str | int, genus: int = 0) -> StratifoldGraph:
    """Alternating path from vertex ids and labels.

    ``path_graph("w1", 2, "b1", 1, "w2")`` is ``w1 -(2)- b1 -(1)- w2``. The first
    vertex is white; colors alternate along the path.
    """
    vertices = list(items[0::2])
    labels = list(items[1::2])
    if len(vertices) != len(labels) + 1:
        raise GraphError("path must start and end with a vertex")
    whites = {v: genus for v in vertices[0::2]}
    blacks = vertices[1::2]
    edges = []
    for i, label in enumerate(labels):
        a, b = vertices[i], vertices[i + 1]
        edges.append((a, b, label) if i % 2 == 0 else (b, a, label))
    return StratifoldGraph(whites, blacks, edges)


# -- structure -----------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    kind: str
    subject: str
    detail: str = ""

    def __str__(self) -> str:
        text = f"{self.kind}: {self.subject}"
        return f"{text} ({self.detail})" if self.detail else text


def _bfs_order(g: StratifoldGraph, start: str, allowed=None) -> list[str]:
    seen = {start}
    order = [start]
    queue = deque([start])
    while queue:
        v = queue.popleft()
        for u in g.neighbors(v):
            if u not in seen and (allowed is None or u in allowed):
                seen.add(u)
                order.append(u)
                queue.append(u)
    return order


def components(g: StratifoldGraph) -> list[StratifoldGraph]:
    """Connected components, ordered by their smallest vertex id."""
    out = []
    seen: set[str] = set()
    for v in sorted(g.vertices):
        if v in seen:
            continue
        part = _bfs_order(g, v)
        seen.update(part)
        out.append(g.subgraph(part))
    return out


def is_connected(g: StratifoldGraph) -> bool:
    if len(g) == 0:
        return False
    return len(_bfs_order(g, g.vertices[0])) == len(g)


def validate_structure(g: StratifoldGraph) -> list[Violation]:
    """Violations that keep ``g`` from being a connected stratifold graph.

    Type invariants (bipartite edges, positive labels, unique ids, existing
    endpoints) are enforced on construction, so only emptiness and
    connectivity can fail here.
    """
    if len(g) == 0:
        return [Violation("Empty", "-", "graph has no vertices")]
    reached = set(_bfs_order(g, min(g.vertices)))
    if len(reached) == len(g):
        return []
    stray = min(set(g.vertices) - reached)
    return [Violation("NotConnected", stray, f"not reachable from {min(g.vertices)}")]


def trivalency_violations(g: StratifoldGraph) -> list[str]:
    """Black vertices whose partition is not 1+1+1, 1+2 or 3."""
    return [b for b in g.blacks if g.labels_at(b) not in TRIVALENT_PATTERNS]


def is_trivalent(g: StratifoldGraph) -> bool:
    return not trivalency_violations(g)


def find_cycle(g: StratifoldGraph) -> list[str] | None:
    """Vertices of some cycle, or None for a forest.

    A doubled edge counts as a cycle of length two.
    """
    pairs = Counter((e.white, e.black) for e in g.edges)
    for (w, b), n in pairs.items():
        if n > 1:
            return [w, b]
    parent: dict[str, str | None] = {}
    for root in g.vertices:
        if root in parent:
            continue
        parent[root] = None
        stack = [root]
        while stack:
            v = stack.pop()
            for u in g.neighbors(v):
                if u == parent[v] or parent.get(u) == v:
                    continue
                if u in parent:
                    return _close_cycle(parent, v, u)
                parent[u] = v
                stack.append(u)
    return None


def _close_cycle(parent, v, u) -> list[str]:
    ancestors = [v]
    while parent[ancestors[-1]] is not None:
        ancestors.append(parent[ancestors[-1]])
    on_path = set(ancestors)
    right = [u]
    while right[-1] not in on_path:
        right.append(parent[right[-1]])
    top = right[-1]
    left = ancestors[: ancestors.index(top) + 1]
    return left + right[-2::-1]


def is_tree(g: StratifoldGraph) -> bool:
    return len(g) > 0 and len(g.edges) == len(g) - 1 and is_connected(g)


def require_tree(g: StratifoldGraph) -> None:
    if len(g) == 0:
        raise NotATreeError("empty graph is not a tree")
    cycle = find_cycle(g)
    if cycle is not None:
        raise NotATreeError(f"graph has a cycle through {', '.join(cycle)}")
    if not is_connected(g):
        raise NotATreeError("graph is disconnected")


def delete_open_star(g: StratifoldGraph, vertices: Iterable[str]) -> list[StratifoldGraph]:
    """Remove ``vertices`` with their incident edges; return the components left."""
    return components(g.with_changes(remove_vertices=vertices))


def prune(
    g: StratifoldGraph,
    vertices: Iterable[str],
    edges: Iterable[tuple[str, str, int]] | None = None,
) -> StratifoldGraph:
    """Pruned graph of the subgraph given by ``vertices`` (and ``edges``).

    Every edge of ``g`` outside the subgraph but incident to one of its black
    vertices is added back; when its white end lies outside the subgraph, that
    end is a fresh terminal white of genus 0 (ids ``p0``, ``p1``, ...).
    """
    sub = g.subgraph(vertices, edges)
    inside = Counter(sub.edges)
    extra_edges = []
    new_whites: dict[str, int] = {}
    taken = set(g.vertices)
    for b in sub.blacks:
        for e in g.incident(b):
            if inside[e]:
                inside[e] -= 1
                continue
            if e.white in sub:
                extra_edges.append(e)
            else:
                t = fresh_id(taken, "p")
                taken.add(t)
                new_whites[t] = 0
                extra_edges.append(Edge(t, b, e.label))
    return sub.with_changes(add_whites=new_whites, add_edges=extra_edges)


# -- text format ---------------------------------------------------------


def serialize(g: StratifoldGraph) -> str:
    lines = [f"w {w} {genus}" for w, genus in g.whites.items()]
    lines += [f"b {b}" for b in g.blacks]
    lines += [f"e {e.white} {e.black} {e.label}" for e in g.edges]
    return "\n".join(lines) + "\n"


def serialize_many(graphs: Iterable[StratifoldGraph]) -> str:
    return "\n".join(serialize(g) for g in graphs)


def _parse_int(token: str, line: int, col: int, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise GraphFormatError(f"{what} must be an integer, got {token!r}", line, col) from None


def _parse_record(lines: Sequence[tuple[int, str]]) -> StratifoldGraph:
    whites: dict[str, int] = {}
    blacks: list[str] = []
    edges: list[tuple[str, str, int]] = []
    where: dict[str, int] = {}
    for lineno, raw in lines:
        tokens = raw.split()
        cols = []
        pos = 0
        for t in tokens:
            pos = raw.index(t, pos)
            cols.append(pos + 1)
            pos += len(t)
        kind = tokens[0]
        if kind in ("w", "b"):
            want = 3 if kind == "w" else 2
            if len(tokens) != want:
                raise GraphFormatError(
                    f"'{kind}' record takes {want - 1} field(s), got {len(tokens) - 1}", lineno, cols[0]
                )
            vid = tokens[1]
            if vid in where:
                raise GraphFormatError(
                    f"duplicate id {vid!r} (first defined on line {where[vid]})", lineno, cols[1]
                )
            where[vid] = lineno
            if kind == "w":
                whites[vid] = _parse_int(tokens[2], lineno, cols[2], "genus")
            else:
                blacks.append(vid)
        elif kind == "e":
            if len(tokens) != 4:
                raise GraphFormatError(f"'e' record takes 3 fields, got {len(tokens) - 1}", lineno, cols[0])
            label = _parse_int(tokens[3], lineno, cols[3], "label")
            if label < 1:
                raise GraphFormatError("label < 1", lineno, cols[3])
            edges.append((tokens[1], tokens[2], label))
        else:
            raise GraphFormatError(f"unknown record type {kind!r}", lineno, cols[0])
    for lineno, raw in lines:
        tokens = raw.split()
        if tokens[0] != "e":
            continue
        w, b = tokens[1], tokens[2]
        for vid, col_tok in ((w, 1), (b, 2)):
            if vid not in where:
                raise GraphFormatError(
                    f"dangling edge endpoint {vid!r}", lineno, raw.index(tokens[col_tok]) + 1
                )
        if w not in whites:
            raise GraphFormatError(f"edge must start at a white vertex, {w!r} is black", lineno)
        if b in whites:
            raise GraphFormatError(f"edge must end at a black vertex, {b!r} is white", lineno)
    return StratifoldGraph(whites, blacks, edges)


def _records(text: str) -> Iterator[list[tuple[int, str]]]:
    current: list[tuple[int, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        if not body.strip():
            if not raw.strip() and current:
                yield current
                current = []
            continue
        current.append((lineno, body))
    if current:
        yield current


def parse_many(text: str) -> list[StratifoldGraph]:
    """Parse a blank-line separated stream of graph records."""
    return [_parse_record(rec) for rec in _records(text)]


def parse(text: str) -> StratifoldGraph:
    """Parse exactly one graph record."""
    records = list(_records(text))
    if not records:
        raise GraphFormatError("no graph record found", 1)
    if len(records) > 1:
        raise GraphFormatError("expected one graph record, found several", records[1][0][0])
    return _parse_record(records[0])


def export_dot(g: StratifoldGraph, name: str = "G") -> str:
    lines = [f"graph {name} {{"]
    for w, genus in g.whites.items():
        lines.append(f'  "{w}" [shape=circle, style="", label="{w}\\ng={genus}"];')
    for b in g.blacks:
        lines.append(f'  "{b}" [shape=point, style=filled, width=0.15];')
    for e in g.edges:
        lines.append(f'  "{e.white}" -- "{e.black}" [label="{e.label}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
