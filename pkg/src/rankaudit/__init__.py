"""rankaudit: explain PageRank-style rankings through influential elements.

The library finds the k edges, nodes, or vertex-induced subgraphs whose
removal moves a loss over the ranking vector the most, using a rank-one
closed form for the loss gradient over adjacency entries and greedy
selection with per-step recomputation. Reference selectors (random,
degree, ranking score, hub/authority, exhaustive search) and an
experiment harness are included, along with scikit-learn style estimator
wrappers and a CLI (``rankaudit --help``).
"""

__version__ = "0.1.0"

from .audit import (AuditResult, AuditStep, audit, audit_edges, audit_nodes,
                    audit_subgraph, evaluate_delta_f)
from .baselines import (HitsScores, brute_force, hits, select_degree,
                        select_hits, select_pagerank, select_random)
from .errors import (ConvergenceError, EdgeListParseError, RankAuditError,
                     ResourceLimitError, UsageError, ValidationError)
from .estimators import (DegreeBaseline, EdgeInfluenceAuditor,
                         ExhaustiveBaseline, HitsBaseline,
                         NodeInfluenceAuditor, PageRankBaseline,
                         RandomBaseline, SubgraphInfluenceAuditor)
from .graph import (ElementKind, ElementSet, Graph, NormMode, load_edge_list,
                    write_sidecar)
from .harness import (ExperimentConfig, ExperimentReport, ReportRow,
                      emit_tables, erdos_renyi_graph, run_comparison,
                      run_scaling)
from .influence import (GradientFactors, GradientVariant, edge_influence,
                        edge_influence_table, element_set_influence,
                        gradient_factors, gradient_factors_normalized,
                        node_influence, node_influence_table,
                        subgraph_influence)
from .losses import (EnergyNorm, LossFunction, LpNorm, SoftMax, SquaredL2,
                     parse_loss)
from .solvers import (RankVector, TeleportSpec, default_damping, pagerank,
                      resolvent_transpose_apply, spectral_radius_estimate)

__all__ = [
    "AuditResult", "AuditStep", "audit", "audit_edges", "audit_nodes",
    "audit_subgraph", "evaluate_delta_f",
    "HitsScores", "brute_force", "hits", "select_degree", "select_hits",
    "select_pagerank", "select_random",
    "ConvergenceError", "EdgeListParseError", "RankAuditError",
    "ResourceLimitError", "UsageError", "ValidationError",
    "DegreeBaseline", "EdgeInfluenceAuditor", "ExhaustiveBaseline",
    "HitsBaseline", "NodeInfluenceAuditor", "PageRankBaseline",
    "RandomBaseline", "SubgraphInfluenceAuditor",
    "ElementKind", "ElementSet", "Graph", "NormMode", "load_edge_list",
    "write_sidecar",
    "ExperimentConfig", "ExperimentReport", "ReportRow", "emit_tables",
    "erdos_renyi_graph", "run_comparison", "run_scaling",
    "GradientFactors", "GradientVariant", "edge_influence",
    "edge_influence_table", "element_set_influence", "gradient_factors",
    "gradient_factors_normalized", "node_influence", "node_influence_table",
    "subgraph_influence",
    "EnergyNorm", "LossFunction", "LpNorm", "SoftMax", "SquaredL2",
    "parse_loss",
    "RankVector", "TeleportSpec", "default_damping", "pagerank",
    "resolvent_transpose_apply", "spectral_radius_estimate",
]
