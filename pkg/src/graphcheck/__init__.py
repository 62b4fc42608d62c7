"""Exact simulation of a quantum-walk test for graph completeness."""

from .analytic import default_constants, p_marked_closed, solve_a
from .graph import (
    Graph,
    GraphError,
    MarkedSet,
    StochasticMatrix,
    complete_graph,
    is_complete_classical,
    load_graph,
    mark_nodes,
    parse_edge_list,
    remove_edges,
    transition_matrix,
)
from .spectral import walk_spectrum
from .tester import TestReport, analyze, test_completeness
from .walk import build_walk, evolve, initial_state, marked_probability

__all__ = [
    "Graph",
    "GraphError",
    "MarkedSet",
    "StochasticMatrix",
    "TestReport",
    "analyze",
    "build_walk",
    "complete_graph",
    "default_constants",
    "evolve",
    "initial_state",
    "is_complete_classical",
    "load_graph",
    "mark_nodes",
    "marked_probability",
    "p_marked_closed",
    "parse_edge_list",
    "remove_edges",
    "solve_a",
    "test_completeness",
    "transition_matrix",
    "walk_spectrum",
]

__version__ = "0.1.0"
