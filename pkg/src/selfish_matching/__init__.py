"""Minimum-cost perfect matchings under local stability.

Generators for layered line instances, exhaustive PoA/PoS computation,
the greedy flip pass with trace verification, and flip-forest cost
accounting, behind a compiled kernel core with a pure Python fallback.
"""

from ._backend import COMPILED, backend_name
from .errors import (
    AlphaOutOfRangeError,
    EpsilonOutOfRangeError,
    InconsistentTraceError,
    InstanceTooLargeError,
    InternalInstabilityError,
    KOutOfRangeError,
    NoEmbeddingError,
    NonPositiveWeightError,
    NoStableMatchingError,
    NotIncreasingError,
    NotMetricError,
    NotSymmetricError,
    NTooLargeError,
    OddVertexCountError,
    ParseError,
    SelfishMatchingError,
    ValidationError,
    VertexMismatchError,
)
from .instances import (
    InstanceKind,
    LineEmbedding,
    MetricInstance,
    MetricReport,
    build_bipartite,
    build_complete,
    default_epsilon,
    deserialize_instance,
    from_line,
    gen_random_euclidean,
    gen_random_line,
    gen_rt,
    gen_rt_alpha,
    instance_from_payload,
    metric_check,
    serialize_instance,
)
from .matchings import (
    DEFAULT_MAX_ENUM,
    PerfectMatching,
    StabilityReport,
    alternating_cycles,
    consecutive_matching,
    cost,
    count_alpha_stable,
    deserialize_matching,
    enumerate_perfect_matchings,
    exact_poa,
    exact_pos,
    is_alpha_stable,
    line_pos_matching,
    matching_from_partner,
    matching_from_payload,
    min_cost_matching,
    serialize_matching,
    sorted_edge_list,
    stability_report,
)
from .greedy import (
    EDGE_ORDER,
    FlipEvent,
    FlipTrace,
    TraceCheckReport,
    check_trace_lemmas,
    deserialize_trace,
    replay,
    run_greedy,
    serialize_trace,
)
from .flipforest import (
    AbstractTree,
    BoundReport,
    CostBoundReport,
    FlipForest,
    ForestNode,
    balanced_complete_tree,
    build_forest,
    check_decomposition_identities,
    check_weight_bound,
    closed_form_effect,
    count_tree_shapes,
    effect,
    enumerate_tree_shapes,
    forest_cost_bound,
    from_shape,
    light_depths,
    serialize_forest,
    serialize_tree,
    tree_effects_batch,
    virtual_weights,
)
from .harness import (
    CSV_HEADER,
    ExperimentRecord,
    SearchRecord,
    adaptive_alpha,
    main,
    pos_bound,
    pos_exponent,
    records_to_csv,
    run_analyze,
    run_search_line_mc,
    run_search_tree_effect,
    run_sweep,
)

__version__ = "0.1.0"

__all__ = [
    "AbstractTree",
    "AlphaOutOfRangeError",
    "BoundReport",
    "COMPILED",
    "CostBoundReport",
    "CSV_HEADER",
    "DEFAULT_MAX_ENUM",
    "EDGE_ORDER",
    "EpsilonOutOfRangeError",
    "ExperimentRecord",
    "FlipEvent",
    "FlipForest",
    "FlipTrace",
    "ForestNode",
    "InconsistentTraceError",
    "InstanceKind",
    "InstanceTooLargeError",
    "InternalInstabilityError",
    "KOutOfRangeError",
    "LineEmbedding",
    "MetricInstance",
    "MetricReport",
    "NoEmbeddingError",
    "NonPositiveWeightError",
    "NoStableMatchingError",
    "NotIncreasingError",
    "NotMetricError",
    "NotSymmetricError",
    "NTooLargeError",
    "OddVertexCountError",
    "ParseError",
    "PerfectMatching",
    "SearchRecord",
    "SelfishMatchingError",
    "StabilityReport",
    "TraceCheckReport",
    "ValidationError",
    "VertexMismatchError",
    "adaptive_alpha",
    "alternating_cycles",
    "backend_name",
    "balanced_complete_tree",
    "build_bipartite",
    "build_complete",
    "build_forest",
    "check_decomposition_identities",
    "check_trace_lemmas",
    "check_weight_bound",
    "closed_form_effect",
    "consecutive_matching",
    "cost",
    "count_alpha_stable",
    "count_tree_shapes",
    "default_epsilon",
    "deserialize_instance",
    "deserialize_matching",
    "deserialize_trace",
    "effect",
    "enumerate_perfect_matchings",
    "enumerate_tree_shapes",
    "exact_poa",
    "exact_pos",
    "forest_cost_bound",
    "from_line",
    "from_shape",
    "gen_random_euclidean",
    "gen_random_line",
    "gen_rt",
    "gen_rt_alpha",
    "instance_from_payload",
    "is_alpha_stable",
    "light_depths",
    "line_pos_matching",
    "main",
    "matching_from_partner",
    "matching_from_payload",
    "metric_check",
    "min_cost_matching",
    "pos_bound",
    "pos_exponent",
    "records_to_csv",
    "replay",
    "run_analyze",
    "run_greedy",
    "run_search_line_mc",
    "run_search_tree_effect",
    "run_sweep",
    "serialize_forest",
    "serialize_instance",
    "serialize_matching",
    "serialize_trace",
    "serialize_tree",
    "sorted_edge_list",
    "stability_report",
    "tree_effects_batch",
    "virtual_weights",
    "__version__",
]
