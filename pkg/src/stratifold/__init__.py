"""Simply connected trivalent 2-stratifold graphs: decide, certify, enumerate."""

from .canon import brute_force_isomorphic, canonical_code, graph_from_code
from .census import (
    CensusRecord,
    CensusReport,
    DisagreementError,
    census_crosscheck,
    census_read,
    census_write,
    enumerate_trivalent_trees,
    run_census,
)
from .classifier import Kind, Verdict, classify, decompose, horned_search, reduced_graph, verify_horned
from .generator import (
    BuildSequence,
    O1,
    O1Star,
    O2,
    collapsible_from_rooted_tree,
    deconstruct,
    horned_tree_from_tree,
    level,
    op1,
    op1_star,
    op2,
    random_simply_connected,
    rebuild_all_ones,
    replay,
)
from .graph import (
    Edge,
    GraphError,
    GraphFormatError,
    StratifoldGraph,
    b12_tree,
    b111_tree,
    export_dot,
    parse,
    prune,
    serialize,
    single_white,
)
from .homology import h1_dim, oracle_simply_connected, pi1_presentation, relation_matrix

__version__ = "0.1.0"

__all__ = [
    "BuildSequence", "CensusRecord", "CensusReport", "DisagreementError", "Edge", "GraphError",
    "GraphFormatError", "Kind", "O1", "O1Star", "O2", "StratifoldGraph", "Verdict",
    "b111_tree", "b12_tree", "brute_force_isomorphic", "canonical_code", "census_crosscheck",
    "census_read", "census_write", "classify", "collapsible_from_rooted_tree", "deconstruct",
    "decompose", "enumerate_trivalent_trees", "export_dot", "graph_from_code", "h1_dim",
    "horned_search", "horned_tree_from_tree", "level", "op1", "op1_star", "op2",
    "oracle_simply_connected", "parse", "pi1_presentation", "prune", "random_simply_connected",
    "rebuild_all_ones", "reduced_graph", "relation_matrix", "replay", "run_census", "serialize",
    "single_white", "verify_horned",
]
