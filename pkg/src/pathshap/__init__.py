"""Shapley-value responsibility of edges and vertices for regular path
query answers on edge-labeled directed graphs."""

from .automata import Dfa, LanguageProfile, accepts, compile, language_profile, words_up_to
from .explain import (
    EdgeCategorization,
    ExplainRequest,
    GapBound,
    candidate_supports,
    categorize_edges,
    count_blocking,
    count_enabling,
    edge_game,
    edge_on_simple_path,
    gap_bound,
    shapley_multiplicative,
    shapley_short_rpq,
    solve,
    vertex_game,
)
from .game import (
    CoalitionGame,
    SampledEstimate,
    ShapleyReport,
    sample_count,
    shapley_exact_permutation,
    shapley_exact_subset,
    shapley_mc,
    shapley_nonzero,
)
from .graph import Edge, LabeledGraph, edge_subgraph, load_graph, serialize, vertex_subgraph
from .query import (
    Assignment,
    Crpq,
    RpqAtom,
    atom_relation,
    compile_crpq,
    enumerate_answers,
    eval_crpq_bound,
    eval_rpq,
    parse_binding,
)
from .regex import RegexAst, parse_regex

__all__ = [
    "Assignment",
    "CoalitionGame",
    "Crpq",
    "Dfa",
    "Edge",
    "EdgeCategorization",
    "ExplainRequest",
    "GapBound",
    "LabeledGraph",
    "LanguageProfile",
    "RegexAst",
    "RpqAtom",
    "SampledEstimate",
    "ShapleyReport",
    "accepts",
    "atom_relation",
    "candidate_supports",
    "categorize_edges",
    "compile",
    "compile_crpq",
    "count_blocking",
    "count_enabling",
    "edge_game",
    "edge_on_simple_path",
    "edge_subgraph",
    "enumerate_answers",
    "eval_crpq_bound",
    "eval_rpq",
    "gap_bound",
    "language_profile",
    "load_graph",
    "parse_binding",
    "parse_regex",
    "sample_count",
    "serialize",
    "shapley_exact_permutation",
    "shapley_exact_subset",
    "shapley_mc",
    "shapley_multiplicative",
    "shapley_nonzero",
    "shapley_short_rpq",
    "solve",
    "vertex_game",
    "vertex_subgraph",
    "words_up_to",
]
