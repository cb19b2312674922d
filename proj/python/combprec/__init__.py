"""Combinatorial forest preconditioners for PDHG on graphs."""

from ._core import (
    ConvergenceError,
    DivergenceError,
    Graph,
    ParseError,
    Partition,
    SizeLimitError,
    arboricity,
    condition_number,
    decompose,
    erdos_renyi,
    fused_lasso,
    grad,
    grid_graph,
    knn_graph,
    maxflow_cut,
    parse_graph,
    random_connected_graph,
    segment,
    serialize_graph,
    sigma_max,
    three_moons,
    tv_on_tree,
)

__all__ = [
    "ConvergenceError",
    "DivergenceError",
    "Graph",
    "ParseError",
    "Partition",
    "SizeLimitError",
    "arboricity",
    "condition_number",
    "decompose",
    "erdos_renyi",
    "fused_lasso",
    "grad",
    "grid_graph",
    "knn_graph",
    "maxflow_cut",
    "parse_graph",
    "random_connected_graph",
    "segment",
    "serialize_graph",
    "sigma_max",
    "three_moons",
    "tv_on_tree",
]
