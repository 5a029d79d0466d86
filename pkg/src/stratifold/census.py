"""Exhaustive census of trivalent labeled trees, cross-checked against the oracle.

Trees are grown one black vertex at a time: every tree with ``n`` blacks
arises from one with ``n - 1`` blacks by hanging a new black (with fresh leaf
whites) on a white. Two growth strategies are provided and must agree:

* ``"dedup"`` keeps a global set of canonical codes per level;
* ``"orderly"`` accepts a child only when its canonical parent (smallest code
  over all ways of undoing one attachment) is the parent that produced it,
  so duplicates can only appear among siblings.

A slow reference enumerator built on ``networkx.nonisomorphic_trees`` and a
backtracking isomorphism test pins the counts for small sizes.
"""

from __future__ import annotations

import heapq
import itertools
import zlib
from collections import Counter, defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, TextIO

from .canon import brute_force_isomorphic, graph_from_code, part_code
from .classifier import Kind, classify
from .generator import deconstruct_unchecked, replay
from .graph import StratifoldGraph, serialize
from .homology import Reason, h1_dim, oracle_simply_connected

FORMAT_HEADER = "stratacensus v1"


class DisagreementError(RuntimeError):
    """Classifier and oracle (or a replayed certificate) disagree. Always a bug."""

    def __init__(self, message: str, graph: StratifoldGraph):
        super().__init__(f"{message}\n{serialize(graph)}")
        self.graph = graph


class CensusFormatError(ValueError):
    pass


# -- enumeration ---------------------------------------------------------


def _attachments(terminal_blacks: bool, genera: tuple[int, ...]):
    """(edge label at the host white, labels to the new leaves) per black type."""
    shapes = [(1, (2,)), (2, (1,)), (1, (1, 1))]
    if terminal_blacks:
        shapes.append((3, ()))
    for host_label, leaf_labels in shapes:
        for leaf_genera in itertools.product(genera, repeat=len(leaf_labels)):
            if leaf_labels == (1, 1) and leaf_genera[0] > leaf_genera[1]:
                continue
            yield host_label, tuple(zip(leaf_labels, leaf_genera))


def _code(g: StratifoldGraph) -> str:
    return part_code(g, min(g.vertices))


def _grow(g: StratifoldGraph, shapes) -> Iterator[tuple[StratifoldGraph, str]]:
    for w in g.whites:
        for host_label, leaves in shapes:
            new_whites = {f"n{i}": genus for i, (_, genus) in enumerate(leaves)}
            edges = [(w, "nb", host_label)] + [(f"n{i}", "nb", lab) for i, (lab, _) in enumerate(leaves)]
            child = g.with_changes(add_whites=new_whites, add_blacks=["nb"], add_edges=edges)
            yield child, w


def _reductions(g: StratifoldGraph) -> Iterator[StratifoldGraph]:
    """Every tree with one fewer black that grows into ``g`` by one attachment."""
    leaves = {w for w in g.whites if g.degree(w) == 1}
    for b in g.blacks:
        nbrs = g.neighbors(b)
        inner = [w for w in nbrs if w not in leaves]
        if len(inner) > 1:
            continue
        keep_options = inner if inner else sorted(set(nbrs))
        for keep in keep_options:
            yield g.with_changes(remove_vertices=[b] + [w for w in nbrs if w != keep])


def _canonical_parent(g: StratifoldGraph) -> str:
    return min(_code(r) for r in _reductions(g))


def _base_level(genera: tuple[int, ...]) -> list[str]:
    return sorted({_code(StratifoldGraph({"w": genus})) for genus in genera})


def enumerate_codes(
    max_blacks: int,
    terminal_blacks: bool = False,
    genera: tuple[int, ...] = (0,),
    method: str = "dedup",
) -> Iterator[tuple[int, list[str]]]:
    """Yield ``(n, sorted codes of all trees with n blacks)`` for n = 0..max_blacks."""
    if max_blacks < 0:
        raise ValueError("max_blacks must be >= 0")
    if method not in ("dedup", "orderly"):
        raise ValueError(f"unknown method {method!r}")
    shapes = list(_attachments(terminal_blacks, tuple(genera)))
    level = _base_level(tuple(genera))
    yield 0, level
    for n in range(1, max_blacks + 1):
        found: set[str] = set()
        for code in level:
            parent = graph_from_code(code)
            siblings: set[str] = set()
            for child, _ in _grow(parent, shapes):
                c = _code(child)
                if method == "dedup":
                    found.add(c)
                elif c not in siblings and _canonical_parent(child) == code:
                    siblings.add(c)
            if method == "orderly":
                if found & siblings:
                    raise RuntimeError("orderly generation produced a duplicate")
                found |= siblings
        level = sorted(found)
        yield n, level


def default_min_blacks(max_blacks: int) -> int:
    """The lone white is listed only when it is the whole universe (``max_blacks = 0``)."""
    return min(1, max_blacks)


def enumerate_trivalent_trees(
    max_blacks: int,
    terminal_blacks: bool = False,
    genera: tuple[int, ...] = (0,),
    method: str = "dedup",
    min_blacks: int | None = None,
) -> Iterator[StratifoldGraph]:
    """Each isomorphism class once, ordered by (black count, canonical code).

    Sizes run from ``min_blacks`` (default :func:`default_min_blacks`) to
    ``max_blacks``. Graphs use the ids of :func:`graph_from_code`.
    """
    lo = default_min_blacks(max_blacks) if min_blacks is None else min_blacks
    for n, codes in enumerate_codes(max_blacks, terminal_blacks, genera, method):
        if n >= lo:
            for code in codes:
                yield graph_from_code(code)


def reference_enumeration(
    max_blacks: int,
    terminal_blacks: bool = False,
    genera: tuple[int, ...] = (0,),
) -> list[StratifoldGraph]:
    """Brute-force census: all unlabeled trees, all colorings and labelings.

    Deduplicates by pairwise backtracking isomorphism. Exponential; meant for
    ``max_blacks <= 3``.
    """
    import networkx as nx

    found: list[StratifoldGraph] = []

    def admit(g: StratifoldGraph) -> None:
        if not any(brute_force_isomorphic(g, h) for h in found):
            found.append(g)

    for genus in genera:
        admit(StratifoldGraph({"v0": genus}))
    max_vertices = 3 * max_blacks + 1
    for order in range(2, max_vertices + 1):
        for tree in nx.nonisomorphic_trees(order):
            coloring = nx.bipartite.color(tree)
            for black_color in (0, 1):
                blacks = [v for v in tree if coloring[v] == black_color]
                whites = [v for v in tree if coloring[v] != black_color]
                if not 1 <= len(blacks) <= max_blacks:
                    continue
                allowed = (1, 2, 3) if terminal_blacks else (2, 3)
                if any(tree.degree(b) not in allowed for b in blacks):
                    continue
                choices = []
                for b in blacks:
                    nbrs = sorted(tree[b])
                    if len(nbrs) == 3:
                        choices.append([{(n, b): 1 for n in nbrs}])
                    elif len(nbrs) == 2:
                        choices.append([{(nbrs[0], b): 1, (nbrs[1], b): 2}, {(nbrs[0], b): 2, (nbrs[1], b): 1}])
                    else:
                        choices.append([{(nbrs[0], b): 3}])
                for labeling in itertools.product(*choices):
                    labels = {}
                    for part in labeling:
                        labels.update(part)
                    for genus_choice in itertools.product(genera, repeat=len(whites)):
                        g = StratifoldGraph(
                            {f"v{w}": gn for w, gn in zip(whites, genus_choice)},
                            [f"v{b}" for b in blacks],
                            [(f"v{w}", f"v{b}", lab) for (w, b), lab in labels.items()],
                        )
                        admit(g)
    return found


# -- records -------------------------------------------------------------


@dataclass(frozen=True, order=True)
class CensusRecord:
    blacks: int
    code: str
    whites: int
    verdict: str
    oracle: str
    h1z2: int | None
    h1z3: int | None
    seqlen: int | None

    def line(self) -> str:
        def opt(x):
            return "-" if x is None else str(x)

        return (
            f"{self.code} {self.blacks} {self.whites} {self.verdict} {self.oracle} "
            f"{opt(self.h1z2)} {opt(self.h1z3)} {opt(self.seqlen)}"
        )

    @classmethod
    def from_line(cls, line: str, index: int) -> CensusRecord:
        fields = line.split()
        if len(fields) != 8:
            raise CensusFormatError(f"record {index}: expected 8 fields, got {len(fields)}")

        def opt(x):
            return None if x == "-" else int(x)

        try:
            return cls(
                int(fields[1]), fields[0], int(fields[2]), fields[3], fields[4],
                opt(fields[5]), opt(fields[6]), opt(fields[7]),
            )
        except ValueError:
            raise CensusFormatError(f"record {index}: malformed numeric field") from None


def _sampled(code: str, blacks: int) -> bool:
    return blacks <= 5 or zlib.crc32(code.encode("ascii")) % 10 == 0


def make_record(g: StratifoldGraph, roundtrip: bool = True) -> CensusRecord:
    """Classify ``g`` both ways, cross-check, and optionally round-trip its certificate."""
    code = _code(g)
    verdict = classify(g)
    oracle = oracle_simply_connected(g)
    if verdict.simply_connected != oracle.simply_connected:
        raise DisagreementError(
            f"classifier says {verdict.describe()}, oracle says {oracle.describe()}", g
        )
    genus0 = all(genus == 0 for genus in g.whites.values())
    h1z2 = h1_dim(g, 2) if genus0 else None
    h1z3 = h1_dim(g, 3) if genus0 else None
    seqlen = None
    if verdict.simply_connected:
        seq = deconstruct_unchecked(g)
        seqlen = len(seq)
        if roundtrip and _sampled(code, len(g.blacks)) and _code(replay(seq)) != code:
            raise DisagreementError("deconstruct/replay does not reproduce the graph", g)
    return CensusRecord(len(g.blacks), code, len(g.whites), verdict.kind.value, oracle.reason.value,
                        h1z2, h1z3, seqlen)


@dataclass
class CensusReport:
    by_size: dict[int, Counter] = field(default_factory=lambda: defaultdict(Counter))

    def add(self, record: CensusRecord) -> None:
        row = self.by_size[record.blacks]
        row["total"] += 1
        row[record.verdict] += 1

    @property
    def total(self) -> int:
        return sum(row["total"] for row in self.by_size.values())

    def count(self, kind: Kind | str, blacks: int | None = None) -> int:
        key = kind.value if isinstance(kind, Kind) else kind
        rows = self.by_size.values() if blacks is None else [self.by_size.get(blacks, Counter())]
        return sum(row[key] for row in rows)

    def format(self) -> str:
        kinds = [k.value for k in Kind]
        header = ["blacks", "total"] + kinds
        rows = [header]
        for n in sorted(self.by_size):
            row = self.by_size[n]
            rows.append([str(n), str(row["total"])] + [str(row[k]) for k in kinds])
        widths = [max(len(r[i]) for r in rows) for i in range(len(header))]
        lines = ["  ".join(cell.rjust(w) for cell, w in zip(r, widths)) for r in rows]
        lines.append("")
        lines.append(f"total={self.total}")
        for k in kinds:
            lines.append(f"{k}={self.count(k)}")
        lines.append("disagreements=0")
        return "\n".join(lines) + "\n"


def census_crosscheck(
    graphs: Iterable[StratifoldGraph],
    sink: Callable[[CensusRecord], None] | None = None,
    roundtrip: bool = True,
) -> CensusReport:
    """Record every graph; raises DisagreementError on the first mismatch."""
    report = CensusReport()
    for g in graphs:
        rec = make_record(g, roundtrip)
        report.add(rec)
        if sink is not None:
            sink(rec)
    return report


def _records_for_codes(codes: list[str]) -> list[CensusRecord]:
    return [make_record(graph_from_code(c)) for c in codes]


def run_census(
    max_blacks: int,
    shards: int = 1,
    terminal_blacks: bool = False,
    genera: tuple[int, ...] = (0,),
    min_blacks: int | None = None,
) -> tuple[list[CensusRecord], CensusReport]:
    """Enumerate and cross-check; ``shards > 1`` checks shards in worker processes."""
    lo = default_min_blacks(max_blacks) if min_blacks is None else min_blacks
    codes = [c for n, level in enumerate_codes(max_blacks, terminal_blacks, genera) if n >= lo for c in level]
    if shards <= 1:
        records = _records_for_codes(codes)
    else:
        parts: list[list[str]] = [[] for _ in range(shards)]
        for c in codes:
            parts[zlib.crc32(c.encode("ascii")) % shards].append(c)
        with ProcessPoolExecutor(max_workers=shards) as pool:
            chunks = list(pool.map(_records_for_codes, parts))
        records = list(merge_records(*(sorted(ch) for ch in chunks)))
    records.sort()
    report = CensusReport()
    for rec in records:
        report.add(rec)
    return records, report


# -- file format ---------------------------------------------------------


def census_write(records: Iterable[CensusRecord], out: TextIO) -> None:
    records = sorted(records)
    out.write(FORMAT_HEADER + "\n")
    for rec in records:
        out.write(rec.line() + "\n")
    out.write(f"end {len(records)}\n")


def census_read(src: TextIO | str) -> list[CensusRecord]:
    text = src if isinstance(src, str) else src.read()
    lines = text.splitlines()
    if not lines:
        raise CensusFormatError("empty census file")
    if lines[0] != FORMAT_HEADER:
        raise CensusFormatError(f"format-version mismatch: expected {FORMAT_HEADER!r}, got {lines[0]!r}")
    records = []
    for i, line in enumerate(lines[1:]):
        if line.startswith("end "):
            try:
                expected = int(line.split()[1])
            except (IndexError, ValueError):
                raise CensusFormatError(f"record {i}: malformed end marker") from None
            if expected != len(records):
                raise CensusFormatError(f"end marker says {expected} records, found {len(records)}")
            if i + 2 != len(lines):
                raise CensusFormatError(f"record {i + 1}: data after end marker")
            return records
        records.append(CensusRecord.from_line(line, i))
    raise CensusFormatError(f"truncated census file: end marker missing after record {len(records) - 1}")


def merge_records(*shards: Iterable[CensusRecord]) -> Iterator[CensusRecord]:
    """Stable sorted merge of individually sorted shards."""
    return heapq.merge(*shards)
