"""Affiliation-graph extraction quality toolkit.

Build bipartite person-club graphs from membership tuples, score extracted
tuples against ground truth, compute graph metric batteries, inject
precision/recall-targeted synthetic errors, and aggregate the resulting
metric biases by F1 bin.
"""

from .analysis import (
    BiasRecord,
    BiasTable,
    aggregate,
    bias_record,
    sign_consistency,
)
from .error_models import (
    EdgeBudget,
    ErrorModel,
    PerturbationResult,
    PerturbationSpec,
    compute_budget,
    overestimation_pct,
    perturb,
    perturb_node_addition,
    perturb_node_disaggregation,
    perturb_preferential,
    perturb_random_edge,
)
from .errors import (
    AffilEvalError,
    BudgetUnderflow,
    DegenerateComponent,
    DegenerateGraph,
    EmptyAfterNormalization,
    EmptyGraph,
    EmptyGroundTruth,
    EmptyInput,
    EmptyPartition,
    MalformedInput,
    MalformedTuple,
    NoData,
    NodeNotFound,
    SamplingStalled,
    SaturatedGraph,
    UnknownFormat,
)
from .experiment import (
    DEFAULT_BIAS_METRICS,
    ExperimentConfig,
    ExperimentResult,
    RunSpec,
    full_metric_report,
    run_experiment,
)
from .graph import (
    AffiliationGraph,
    EdgeTuple,
    NodeId,
    Partition,
    build_graph,
    connected_components,
    degree,
)
from .io import (
    load_graph,
    load_projection,
    parse_tuple_file,
    read_records,
    save_graph,
    save_projection,
    write_records,
)
from .metrics import (
    ComponentMetrics,
    MetricSuite,
    PathMetrics,
    bipartite_density,
    component_metrics,
    compute_metric_suite,
    count_communities,
    degree_stats,
    greedy_modularity_communities,
    path_metrics,
    rmae_club_degrees,
)
from .normalize import (
    DEFAULT_ABBREVIATIONS,
    DEFAULT_TITLES,
    NormalizationConfig,
    entities_match,
    exact_match_config,
    normalize_label,
    persons_match,
)
from .projections import (
    ProjectionGraph,
    avg_clustering,
    project,
    projection_density,
)
from .tuple_eval import (
    BIN_LABELS,
    EvalReport,
    evaluate_tuples,
    f1_bin,
    sample_false_positives,
)

__version__ = "0.1.0"

__all__ = [
    "AffilEvalError",
    "AffiliationGraph",
    "BIN_LABELS",
    "BiasRecord",
    "BiasTable",
    "BudgetUnderflow",
    "ComponentMetrics",
    "DEFAULT_ABBREVIATIONS",
    "DEFAULT_BIAS_METRICS",
    "DEFAULT_TITLES",
    "DegenerateComponent",
    "DegenerateGraph",
    "EdgeBudget",
    "EdgeTuple",
    "EmptyAfterNormalization",
    "EmptyGraph",
    "EmptyGroundTruth",
    "EmptyInput",
    "EmptyPartition",
    "ErrorModel",
    "EvalReport",
    "ExperimentConfig",
    "ExperimentResult",
    "MalformedInput",
    "MalformedTuple",
    "MetricSuite",
    "NoData",
    "NodeId",
    "NodeNotFound",
    "NormalizationConfig",
    "PathMetrics",
    "PerturbationResult",
    "PerturbationSpec",
    "ProjectionGraph",
    "Partition",
    "RunSpec",
    "SamplingStalled",
    "SaturatedGraph",
    "UnknownFormat",
    "aggregate",
    "avg_clustering",
    "bias_record",
    "bipartite_density",
    "build_graph",
    "component_metrics",
    "compute_budget",
    "compute_metric_suite",
    "connected_components",
    "count_communities",
    "degree",
    "degree_stats",
    "entities_match",
    "evaluate_tuples",
    "exact_match_config",
    "f1_bin",
    "full_metric_report",
    "greedy_modularity_communities",
    "load_graph",
    "load_projection",
    "normalize_label",
    "overestimation_pct",
    "parse_tuple_file",
    "path_metrics",
    "persons_match",
    "perturb",
    "perturb_node_addition",
    "perturb_node_disaggregation",
    "perturb_preferential",
    "perturb_random_edge",
    "project",
    "projection_density",
    "read_records",
    "rmae_club_degrees",
    "run_experiment",
    "sample_false_positives",
    "save_graph",
    "save_projection",
    "sign_consistency",
    "write_records",
]
