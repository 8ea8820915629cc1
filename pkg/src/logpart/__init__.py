"""Certified estimation of log-partition functions of pairwise graphical
models, built on balanced spanning-tree coverings of the underlying graph.

The estimate sqrt(L * U) combines a tree-restriction lower bound L with a
reweighted-tree upper bound U; its multiplicative error is certified by the
minimum edge coverage of the tree distribution in use, whose best value is
the graph constant kappa(G) computed (with primal/dual certificates) by the
kappa module. Sampling-based and partition-based variants share the same
machinery, and every quantity is checkable against the brute-force oracles
in logpart.exact.
"""

from .errors import (
    CapExceeded,
    DisconnectedGraphError,
    EdgeUncovered,
    LogpartError,
    ModelFormatError,
    NegativeWeight,
    ValidationError,
)
from .estimator import (
    EstimateReport,
    PartitionDistribution,
    estimate_partition,
    estimate_trw_prime,
    estimate_uniform_sampled,
    lower_upper,
    maxcut_bracket,
    shifted_grid_partitions,
)
from .exact import (
    LogPartitionValue,
    TreeEnumeration,
    enumerate_spanning_trees,
    max_weight_spanning_tree,
    phi_brute_force,
    phi_components,
    phi_tree,
    spanning_tree_count,
)
from .graphs import Graph, SpanningTree, generate_graph, petersen_graph
from .kappa import (
    CoveringResult,
    KappaCertificate,
    StructuralKappaBounds,
    TreeDistribution,
    balanced_covering,
    dual_certificate,
    format_certificate,
    format_covering,
    kappa_bounds_structural,
    kappa_exact,
    kappa_subgraph_form,
    verify_certificate,
)
from .models import PairwiseModel, parse_graph, parse_model, serialize_graph, serialize_model
from .ust import (
    ResistanceBounds,
    ResistanceProfile,
    SampleBatch,
    effective_resistance,
    resistance_bounds_structural,
    sample_size_for,
    sample_ust,
)

__version__ = "0.1.0"

__all__ = [
    "CapExceeded",
    "CoveringResult",
    "DisconnectedGraphError",
    "EdgeUncovered",
    "EstimateReport",
    "Graph",
    "KappaCertificate",
    "LogPartitionValue",
    "LogpartError",
    "ModelFormatError",
    "NegativeWeight",
    "PairwiseModel",
    "PartitionDistribution",
    "ResistanceBounds",
    "ResistanceProfile",
    "SampleBatch",
    "SpanningTree",
    "StructuralKappaBounds",
    "TreeDistribution",
    "TreeEnumeration",
    "ValidationError",
    "balanced_covering",
    "dual_certificate",
    "effective_resistance",
    "enumerate_spanning_trees",
    "estimate_partition",
    "estimate_trw_prime",
    "estimate_uniform_sampled",
    "format_certificate",
    "format_covering",
    "generate_graph",
    "kappa_bounds_structural",
    "kappa_exact",
    "kappa_subgraph_form",
    "lower_upper",
    "max_weight_spanning_tree",
    "maxcut_bracket",
    "parse_graph",
    "parse_model",
    "petersen_graph",
    "phi_brute_force",
    "phi_components",
    "phi_tree",
    "resistance_bounds_structural",
    "sample_size_for",
    "sample_ust",
    "serialize_graph",
    "serialize_model",
    "spanning_tree_count",
    "verify_certificate",
]
