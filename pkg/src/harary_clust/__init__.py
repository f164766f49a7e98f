"""Hierarchical clustering of signed graphs by repeated best Harary cuts."""

__version__ = "0.1.0"

from .balance import (
    BalancedState,
    HararyCutResult,
    SpanningTree,
    balanced_state,
    best_harary_cut,
    frustration_exhaustive,
    harary_cut,
    is_balanced,
    sample_spanning_tree,
    switching_from_tree,
)
from .clusterer import ClusterAssignment, ClusterResult, Config, initial_labels, run, select_component
from .graph import (
    ComponentSet,
    RawEdge,
    SignedGraph,
    connected_components,
    induced_subgraph,
    load_graph,
    map_rating,
    parse_edge_list,
    preprocess,
)
from .metrics import (
    EdgeCounts,
    MetricsRecord,
    edge_counts,
    fractions,
    loss,
    metrics_record,
    overall_loss,
    unhappy_ratio,
    unhappy_score,
)

from types import ModuleType as _Module

__all__ = [name for name, obj in list(globals().items()) if not name.startswith("_") and not isinstance(obj, _Module)]
