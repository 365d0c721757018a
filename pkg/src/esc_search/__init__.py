"""Skyline community search in bipartite graphs with multi-dimensional edge attributes."""

from .core import (
    Community,
    DegreeConstraint,
    Stats,
    cascade_delete,
    lemma3_check,
    lemma4_check,
    materialize_community,
    maximal_core,
    maximal_core_containing,
)
from .expanding import expand_dim1, expand_dim2, expand_dim3, expand_dimN, expand_search, query_upper_bound
from .graph import (
    BipartiteGraph,
    GraphFormatError,
    Layer,
    VertexRef,
    WorkingGraph,
    filtered_view,
    generate_attributes,
    load_edge_list,
    load_topology,
    random_topology,
    sample_edges,
    write_edge_list,
)
from .oracle import OracleRefused, oracle_community, oracle_skyline, verify_result
from .peeling import CandidateValues, get_cand_vals, peel_dim1, peel_dim2, peel_dim3, peel_dimN, peel_search
from .skyline import (
    SkylineSet,
    ThresholdBox,
    check_lemma1_order,
    divide_space,
    dominates,
    insert_skyline,
    minimal_corners,
    significance,
    skyline,
)

__all__ = [
    "BipartiteGraph",
    "CandidateValues",
    "cascade_delete",
    "check_lemma1_order",
    "Community",
    "DegreeConstraint",
    "divide_space",
    "dominates",
    "expand_dim1",
    "expand_dim2",
    "expand_dim3",
    "expand_dimN",
    "expand_search",
    "filtered_view",
    "generate_attributes",
    "get_cand_vals",
    "GraphFormatError",
    "insert_skyline",
    "Layer",
    "lemma3_check",
    "lemma4_check",
    "load_edge_list",
    "load_topology",
    "materialize_community",
    "maximal_core",
    "maximal_core_containing",
    "minimal_corners",
    "oracle_community",
    "oracle_skyline",
    "OracleRefused",
    "peel_dim1",
    "peel_dim2",
    "peel_dim3",
    "peel_dimN",
    "peel_search",
    "query_upper_bound",
    "random_topology",
    "sample_edges",
    "significance",
    "skyline",
    "SkylineSet",
    "Stats",
    "ThresholdBox",
    "verify_result",
    "VertexRef",
    "WorkingGraph",
    "write_edge_list",
]
