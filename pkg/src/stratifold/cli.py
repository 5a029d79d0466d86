"""``stratifold`` command line.

Exit status: 0 success / simply connected, 1 not simply connected (``check``),
2 bad input, 3 internal invariant failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .canon import graph_from_code
from .census import FORMAT_HEADER, CensusFormatError, DisagreementError, census_read, census_write, run_census
from .classifier import HornedWitness, Kind, NotCollapsible, Verdict, classify
from .generator import (
    NotSimplyConnectedError,
    SequenceError,
    deconstruct,
    parse_sequence,
    random_simply_connected,
    replay,
)
from .graph import GraphError, StratifoldGraph, export_dot, parse, parse_many, serialize
from .homology import NotTrivalentError, PreconditionViolated, oracle_simply_connected

EXIT_OK, EXIT_OBSTRUCTION, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2, 3


class InputError(Exception):
    pass


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _load_graphs(path: str) -> list[StratifoldGraph]:
    text = _read(path)
    if text.startswith(FORMAT_HEADER):
        return [graph_from_code(rec.code) for rec in census_read(text)]
    graphs = parse_many(text)
    if not graphs:
        raise InputError(f"{path}: no graph record found")
    return graphs


def _witness_block(v: Verdict, full: bool) -> list[str]:
    w = v.witness
    lines = []
    if v.kind is Kind.NOT_TREE:
        lines.append("witness: cycle " + " ".join(w))
    elif v.kind is Kind.GENUS_NONZERO:
        lines.append(f"witness: white {w}")
    elif v.kind is Kind.TERMINAL_BLACK:
        lines.append(f"witness: black {w}")
    elif isinstance(w, NotCollapsible):
        lines.append(f"witness: {w.rule} {w.vertex}" + (f" ({w.detail})" if w.detail else ""))
        if full and v.component is not None:
            lines.append("# component")
            lines += serialize(v.component).splitlines()
    elif isinstance(w, HornedWitness):
        lines.append(f"witness: horned tree with {len(w.graph.blacks)} blacks, {len(w.graph.whites)} whites")
        if full:
            lines.append("# horned tree (subgraph of the reduced graph)")
            lines += serialize(w.graph).splitlines()
            lines += [f"map {a} {b}" for a, b in w.vertex_map()]
    return lines


def cmd_check(args) -> int:
    graphs = _load_graphs(args.path)
    if args.dot and len(graphs) != 1:
        raise InputError("--dot needs a single-graph input")
    status = EXIT_OK
    out: list[str] = []
    for i, g in enumerate(graphs):
        verdict = classify(g, certificate=args.certificate)
        if len(graphs) > 1:
            out.append(f"# graph {i}")
        out.append(verdict.kind.value if verdict.simply_connected else f"obstruction: {verdict.kind.value}")
        if args.oracle:
            oracle = oracle_simply_connected(g)
            out.append(f"oracle: {oracle.describe()}")
            if oracle.simply_connected != verdict.simply_connected:
                sys.stdout.write("\n".join(out) + "\n")
                print(f"error: classifier and oracle disagree on graph {i}", file=sys.stderr)
                return EXIT_INTERNAL
        if verdict.simply_connected:
            if args.certificate:
                out += verdict.certificate.serialize().splitlines()
        else:
            status = EXIT_OBSTRUCTION
            out += _witness_block(verdict, args.witness)
    sys.stdout.write("\n".join(out) + "\n")
    if args.dot:
        _emit(export_dot(graphs[0]), args.dot)
    return status


def _parse_weights(text: str | None) -> dict[str, float] | None:
    if text is None:
        return None
    weights = {}
    for item in text.split(","):
        name, _, value = item.partition("=")
        if name not in ("O1", "O1*", "O2"):
            raise InputError(f"unknown operation {name!r} in --weights")
        try:
            weights[name] = float(value)
        except ValueError:
            raise InputError(f"bad weight {value!r} for {name}") from None
    return weights


def cmd_gen(args) -> int:
    if args.steps < 0:
        raise InputError("--steps must be >= 0")
    g, seq = random_simply_connected(args.seed, args.steps, _parse_weights(args.weights))
    _emit(serialize(g), args.out)
    if args.seq_out:
        _emit(seq.serialize(), args.seq_out)
    return EXIT_OK


def cmd_deconstruct(args) -> int:
    g = parse(_read(args.path))
    try:
        seq = deconstruct(g)
    except NotSimplyConnectedError as exc:
        raise InputError(str(exc)) from None
    if serialize(replay(seq)) != serialize(g):
        print("error: certificate does not replay to the input", file=sys.stderr)
        return EXIT_INTERNAL
    _emit(seq.serialize(), args.out)
    return EXIT_OK


def cmd_replay(args) -> int:
    seq = parse_sequence(_read(args.path))
    _emit(serialize(replay(seq)), args.out)
    return EXIT_OK


def cmd_census(args) -> int:
    if args.max_blacks < 0:
        raise InputError("--max-blacks must be >= 0")
    records, report = run_census(
        args.max_blacks, args.shards, terminal_blacks=args.terminal_blacks, min_blacks=args.min_blacks
    )
    if args.out is None or args.out == "-":
        census_write(records, sys.stdout)
    else:
        with open(args.out, "w") as fh:
            census_write(records, fh)
    if args.report:
        _emit(report.format(), args.report)
    else:
        sys.stderr.write(report.format())
    return EXIT_OK


def cmd_export(args) -> int:
    g = parse(_read(args.path))
    if args.dot is not None:
        _emit(export_dot(g), args.dot)
    else:
        _emit(serialize(g), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stratifold", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="decide simple connectivity of graph(s)")
    p.add_argument("path", help="graph file, multi-record stream, or census file ('-' for stdin)")
    p.add_argument("--oracle", action="store_true", help="also run the mod-2 homology oracle")
    p.add_argument("--witness", action="store_true", help="dump the full obstruction witness")
    p.add_argument("--certificate", action="store_true", help="dump a build sequence when simply connected")
    p.add_argument("--dot", metavar="OUT", help="write the input graph as DOT")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("gen", help="random simply connected graph")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--steps", type=int, default=10)
    p.add_argument("--weights", help="e.g. O1=1,O1*=2,O2=1")
    p.add_argument("--out")
    p.add_argument("--seq-out", help="also write the build sequence here")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("deconstruct", help="build sequence of a simply connected graph")
    p.add_argument("path")
    p.add_argument("--out")
    p.set_defaults(func=cmd_deconstruct)

    p = sub.add_parser("replay", help="graph built by a sequence")
    p.add_argument("path")
    p.add_argument("--out")
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("census", help="exhaustive cross-checked census")
    p.add_argument("--max-blacks", type=int, required=True)
    p.add_argument("--min-blacks", type=int, help="smallest size listed (default 1, or 0 when --max-blacks is 0)")
    p.add_argument("--shards", type=int, default=1)
    p.add_argument("--terminal-blacks", action="store_true", help="include blacks with a single label-3 edge")
    p.add_argument("--out")
    p.add_argument("--report", help="write the summary table here instead of stderr")
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("export", help="re-emit a graph canonically or as DOT")
    p.add_argument("path")
    p.add_argument("--dot", nargs="?", const="-", metavar="OUT")
    p.add_argument("--out")
    p.set_defaults(func=cmd_export)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DisagreementError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (InputError, GraphError, SequenceError, CensusFormatError, NotTrivalentError,
            PreconditionViolated) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
