"""Simple-connectivity test from mod-p homology of the relation matrix.

For a tree whose whites all have genus 0, the first homology of the stratifold
with ``Z/p`` coefficients is the cokernel of the white-by-black matrix whose
entry at ``(w, b)`` is the sum of labels joining them, reduced mod ``p``. A
trivalent tree with only white terminal vertices is simply connected exactly
when its mod-2 homology vanishes.

This module is deliberately independent of :mod:`stratifold.classifier`; it is
the oracle the structural classifier is checked against.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import _kernels
from .graph import StratifoldGraph, components, find_cycle, is_connected, trivalency_violations


class PreconditionViolated(ValueError):
    pass


class NotTrivalentError(ValueError):
    def __init__(self, blacks):
        super().__init__(f"graph is not trivalent at {', '.join(blacks)}")
        self.blacks = tuple(blacks)


@dataclass(frozen=True, eq=False)
class GFMatrix:
    p: int
    rows: tuple[str, ...]
    cols: tuple[str, ...]
    data: np.ndarray

    def __eq__(self, other):
        if not isinstance(other, GFMatrix):
            return NotImplemented
        return (
            self.p == other.p
            and self.rows == other.rows
            and self.cols == other.cols
            and np.array_equal(self.data, other.data)
        )

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape


def _tree_genus0_precheck(g: StratifoldGraph) -> None:
    if len(g) == 0 or not is_connected(g) or find_cycle(g) is not None:
        raise PreconditionViolated("relation matrix needs a connected tree")
    bad = [w for w, genus in g.whites.items() if genus != 0]
    if bad:
        raise PreconditionViolated(f"white {bad[0]} has genus {g.genus(bad[0])}, expected 0")


def relation_matrix(g: StratifoldGraph, p: int) -> GFMatrix:
    _tree_genus0_precheck(g)
    rows = tuple(g.whites)
    cols = g.blacks
    row_of = {w: i for i, w in enumerate(rows)}
    col_of = {b: j for j, b in enumerate(cols)}
    data = np.zeros((len(rows), len(cols)), dtype=np.int64)
    for e in g.edges:
        data[row_of[e.white], col_of[e.black]] += e.label
    return GFMatrix(p, rows, cols, data % p)


def gf_rank(m: GFMatrix) -> int:
    return _kernels.rank_gfp(m.data, m.p)


def h1_dim(g: StratifoldGraph, p: int) -> int:
    """Dimension of first homology with Z/p coefficients (genus-0 trees)."""
    return len(g.blacks) - gf_rank(relation_matrix(g, p))


def h1_dim_forest(g: StratifoldGraph, p: int) -> int:
    """Sum of :func:`h1_dim` over the components of a forest; 0 for the empty graph."""
    return sum(h1_dim(part, p) for part in components(g))


def kernel_witness(m: GFMatrix) -> frozenset[str] | None:
    """A nonzero functional on blacks vanishing on every row, as a black subset.

    Only meaningful for ``p = 2`` where a functional is a subset. Returns None
    when the rows span everything.
    """
    if m.p != 2:
        raise ValueError("kernel witness is defined for p = 2")
    basis = _kernels.nullspace_gfp(m.data, 2) if m.cols else np.zeros((0, 0))
    if len(basis) == 0:
        return None
    return frozenset(b for b, bit in zip(m.cols, basis[0]) if bit)


class Reason(str, Enum):
    YES = "yes"
    NOT_TREE = "not-tree"
    GENUS_NONZERO = "genus-nonzero"
    TERMINAL_BLACK = "terminal-black"
    H1_Z2_NONZERO = "h1z2-nonzero"


@dataclass(frozen=True)
class OracleVerdict:
    reason: Reason
    subject: tuple[str, ...] = ()
    h1: int | None = None
    witness: frozenset[str] | None = None

    @property
    def simply_connected(self) -> bool:
        return self.reason is Reason.YES

    def describe(self) -> str:
        if self.reason is Reason.H1_Z2_NONZERO:
            return f"{self.reason.value} dim={self.h1} witness={','.join(sorted(self.witness))}"
        if self.subject:
            return f"{self.reason.value} at {','.join(self.subject)}"
        return self.reason.value


def oracle_simply_connected(g: StratifoldGraph) -> OracleVerdict:
    """Decide simple connectivity from tree/genus/terminal checks and mod-2 rank."""
    offending = trivalency_violations(g)
    if offending:
        raise NotTrivalentError(offending)
    if len(g) == 0 or not is_connected(g):
        raise PreconditionViolated("oracle needs a connected graph")
    cycle = find_cycle(g)
    if cycle is not None:
        return OracleVerdict(Reason.NOT_TREE, tuple(cycle))
    for w, genus in g.whites.items():
        if genus != 0:
            return OracleVerdict(Reason.GENUS_NONZERO, (w,))
    for b in g.blacks:
        if g.degree(b) == 1:
            return OracleVerdict(Reason.TERMINAL_BLACK, (b,))
    m = relation_matrix(g, 2)
    dim = len(g.blacks) - gf_rank(m)
    if dim == 0:
        return OracleVerdict(Reason.YES, h1=0)
    return OracleVerdict(Reason.H1_Z2_NONZERO, h1=dim, witness=kernel_witness(m))


def _power(b: str, k: int) -> str:
    return b if k == 1 else f"{b}^{k}"


def pi1_presentation(g: StratifoldGraph) -> str:
    """Display-only group presentation: generators are blacks, one relator per white.

    Relators multiply ``b^label`` over the white's edges in ascending
    (white, black, label) order. No normal form is claimed.
    """
    _tree_genus0_precheck(g)
    relators = []
    for w in g.whites:
        word = "*".join(_power(e.black, e.label) for e in g.incident(w))
        relators.append(word or "1")
    return f"<{', '.join(g.blacks)} | {', '.join(relators)}>"
