"""Negative-example-informed label propagation on sparse graphs.

The core idea: recast a restart walk as a single transition+teleport
operator, then redirect transition mass that would flow into known negative
examples back toward the seed set. Scores come out of a renormalized power
iteration and feed ranking metrics over repeated sampled trials.
"""

from .bench import (
    METHODS,
    ExperimentConfig,
    ResultRow,
    RunResult,
    run,
    run_single,
    trial_scores,
)
from .graph import (
    COLUMN_STOCHASTIC,
    SYMMETRIC,
    Graph,
    GraphParseError,
    GraphValidationError,
    LoadReport,
    TransitionMatrix,
    column_stochastic,
    load_graph,
    symmetric_normalize,
)
from .metrics import (
    MetricSummary,
    RankedResult,
    Ranking,
    UndefinedMetricError,
    aggregate,
    auc,
    evaluate_ranking,
    pool_instance,
    precision_at_k,
    rank_validation,
)
from .propagation import (
    PropagationConfig,
    RestartModel,
    ScoreVector,
    apply_redirection,
    build_operator,
    custard,
    custard_sq,
    propagate,
    rwr_classical,
    rwr_symmetric,
)
from .ranker import CustardRanker, check_adjacency, check_partial_labels
from .sampling import (
    ResampleRequired,
    TrialBuildError,
    TrialPlan,
    build_trials,
    khop_pool,
    read_manifest,
    sample_negatives,
    sample_seeds,
    trial_rng_seed,
    write_manifest,
)

__version__ = "0.1.0"

__all__ = [
    "COLUMN_STOCHASTIC",
    "SYMMETRIC",
    "METHODS",
    "CustardRanker",
    "ExperimentConfig",
    "Graph",
    "GraphParseError",
    "GraphValidationError",
    "LoadReport",
    "MetricSummary",
    "PropagationConfig",
    "RankedResult",
    "Ranking",
    "ResampleRequired",
    "RestartModel",
    "ResultRow",
    "RunResult",
    "ScoreVector",
    "TransitionMatrix",
    "TrialBuildError",
    "TrialPlan",
    "UndefinedMetricError",
    "aggregate",
    "apply_redirection",
    "auc",
    "build_operator",
    "build_trials",
    "check_adjacency",
    "check_partial_labels",
    "column_stochastic",
    "custard",
    "custard_sq",
    "evaluate_ranking",
    "khop_pool",
    "load_graph",
    "pool_instance",
    "precision_at_k",
    "propagate",
    "rank_validation",
    "read_manifest",
    "run",
    "run_single",
    "rwr_classical",
    "rwr_symmetric",
    "sample_negatives",
    "sample_seeds",
    "symmetric_normalize",
    "trial_rng_seed",
    "trial_scores",
    "write_manifest",
]
