"""Canonical codes for labeled bicolored trees and a brute-force isomorphism test.

The code of a tree rooted at ``v`` is ``w<genus>(...)`` or ``b(...)`` where the
parentheses hold the sorted child entries ``<edge label><child code>``. The
canonical code of an unrooted tree is the smaller of the codes rooted at its
centroid(s), as ASCII bytes.
"""

from __future__ import annotations

import re
from collections import Counter

from .graph import NotATreeError, StratifoldGraph, require_tree

CanonicalCode = bytes


def _rooted_codes(
    g: StratifoldGraph, root: str, parent: str | None = None, blocked=frozenset()
) -> dict[str, str]:
    """Codes of every subtree hanging below ``root`` (away from ``parent``)."""
    order = [root]
    up: dict[str, str | None] = {root: parent}
    up_label: dict[str, int] = {}
    whites = g.whites
    i = 0
    while i < len(order):
        v = order[i]
        i += 1
        is_white = v in whites
        for e in g.incident(v):
            u = e.black if is_white else e.white
            if u == up[v] or u in blocked:
                continue
            up[u] = v
            up_label[u] = e.label
            order.append(u)
    children: dict[str, list[str]] = {v: [] for v in order}
    codes: dict[str, str] = {}
    for v in reversed(order):
        kids = children[v]
        kids.sort()
        head = f"w{whites[v]}(" if v in whites else "b("
        codes[v] = head + "".join(kids) + ")"
        p = up[v]
        if p is not None and p in children:
            children[p].append(f"{up_label[v]}{codes[v]}")
    return codes


def rooted_code(g: StratifoldGraph, root: str, parent: str | None = None) -> str:
    """Code of the branch at ``root``, ignoring the side containing ``parent``."""
    return _rooted_codes(g, root, parent)[root]


def _centroids(g: StratifoldGraph, start: str, blocked=frozenset()) -> list[str]:
    order = [start]
    up: dict[str, str | None] = {start: None}
    for v in order:
        for u in g.neighbors(v):
            if u != up[v] and u not in blocked:
                up[u] = v
                order.append(u)
    n = len(order)
    size = dict.fromkeys(order, 1)
    heaviest = dict.fromkeys(order, 0)
    for v in reversed(order):
        p = up[v]
        if p is not None:
            size[p] += size[v]
            heaviest[p] = max(heaviest[p], size[v])
    best = n
    found: list[str] = []
    for v in order:
        worst = max(heaviest[v], n - size[v])
        if worst < best:
            best, found = worst, [v]
        elif worst == best:
            found.append(v)
    return sorted(found)


def centroids(g: StratifoldGraph) -> list[str]:
    return _centroids(g, min(g.vertices))


def part_code(g: StratifoldGraph, start: str, blocked=frozenset()) -> str:
    """Canonical code (as text) of the tree component of ``start`` once ``blocked`` is removed.

    ``g`` must be a forest; no validation is done.
    """
    return min(_rooted_codes(g, c, None, blocked)[c] for c in _centroids(g, start, blocked))


def canonical_code(g: StratifoldGraph) -> CanonicalCode:
    """Isomorphism-invariant code of a labeled tree.

    Raises NotATreeError for graphs with a cycle, a doubled edge, or more than
    one component.
    """
    require_tree(g)
    return part_code(g, min(g.vertices)).encode("ascii")


_TOKEN = re.compile(r"w(-?\d+)\(|b\(|(\d+)|\)")


def graph_from_code(code: CanonicalCode | str) -> StratifoldGraph:
    """Rebuild a representative tree from its code.

    Whites are named ``w0, w1, ...`` and blacks ``b0, b1, ...`` in preorder.
    """
    text = code.decode("ascii") if isinstance(code, bytes) else code
    whites: dict[str, int] = {}
    blacks: list[str] = []
    edges: list[tuple[str, str, int]] = []
    stack: list[str] = []
    pending: int | None = None
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ValueError(f"malformed canonical code at offset {pos}")
        pos = m.end()
        tok = m.group(0)
        if tok == ")":
            if not stack:
                raise ValueError("unbalanced canonical code")
            stack.pop()
            continue
        if m.group(2) is not None:
            pending = int(m.group(2))
            continue
        if tok.startswith("w"):
            v = f"w{len(whites)}"
            whites[v] = int(m.group(1))
        else:
            v = f"b{len(blacks)}"
            blacks.append(v)
        if stack:
            if pending is None:
                raise ValueError("child without edge label in canonical code")
            parent = stack[-1]
            pair = (parent, v) if parent in whites else (v, parent)
            if (pair[0] in whites) == (pair[1] in whites):
                raise ValueError("canonical code joins two vertices of one color")
            edges.append((pair[0], pair[1], pending))
        elif whites.keys() | set(blacks) != {v}:
            raise ValueError("canonical code has more than one root")
        pending = None
        stack.append(v)
    if stack:
        raise ValueError("unbalanced canonical code")
    if not whites and not blacks:
        raise ValueError("empty canonical code")
    return StratifoldGraph(whites, blacks, edges)


def _vertex_signature(g: StratifoldGraph, v: str):
    if v in g.whites:
        return ("w", g.genus(v), tuple(sorted(e.label for e in g.incident(v))))
    return ("b", 0, g.labels_at(v))


def brute_force_isomorphic(g: StratifoldGraph, h: StratifoldGraph) -> bool:
    """Backtracking search for a color-, genus- and label-preserving bijection.

    Independent of the canonical code; intended as a test oracle on small
    graphs. Handles multigraphs by comparing edge multiplicities per pair.
    """
    if len(g) != len(h) or len(g.edges) != len(h.edges) or len(g.whites) != len(h.whites):
        return False
    sig_g = {v: _vertex_signature(g, v) for v in g.vertices}
    sig_h = {v: _vertex_signature(h, v) for v in h.vertices}
    if Counter(sig_g.values()) != Counter(sig_h.values()):
        return False

    def pair_labels(graph):
        out: dict[frozenset, list[int]] = {}
        for e in graph.edges:
            out.setdefault(frozenset((e.white, e.black)), []).append(e.label)
        return {k: sorted(v) for k, v in out.items()}

    labels_g = pair_labels(g)
    labels_h = pair_labels(h)

    # search order: connected sweep so each vertex after the first in its
    # component has an already-mapped neighbour
    order: list[str] = []
    seen: set[str] = set()
    for s in sorted(g.vertices, key=lambda v: (-g.degree(v), v)):
        if s in seen:
            continue
        seen.add(s)
        order.append(s)
        k = len(order) - 1
        while k < len(order):
            for u in g.neighbors(order[k]):
                if u not in seen:
                    seen.add(u)
                    order.append(u)
            k += 1

    fwd: dict[str, str] = {}
    used: set[str] = set()

    def consistent(v: str, x: str) -> bool:
        for u in set(g.neighbors(v)):
            if u in fwd and labels_g[frozenset((v, u))] != labels_h.get(frozenset((x, fwd[u]))):
                return False
        mapped_nbrs_h = {y for y in h.neighbors(x) if y in used}
        mapped_nbrs_g = {fwd[u] for u in g.neighbors(v) if u in fwd}
        return mapped_nbrs_h == mapped_nbrs_g

    def extend(i: int) -> bool:
        if i == len(order):
            return True
        v = order[i]
        anchor = next((u for u in g.neighbors(v) if u in fwd), None)
        pool = h.neighbors(fwd[anchor]) if anchor is not None else h.vertices
        for x in sorted(set(pool)):
            if x in used or sig_h[x] != sig_g[v] or not consistent(v, x):
                continue
            fwd[v] = x
            used.add(x)
            if extend(i + 1):
                return True
            del fwd[v]
            used.discard(x)
        return False

    return extend(0)


__all__ = [
    "CanonicalCode",
    "NotATreeError",
    "brute_force_isomorphic",
    "canonical_code",
    "centroids",
    "graph_from_code",
    "rooted_code",
]
