"""Measures and selection harness for gesture-biometric score quality.

The package quantifies how well a candidate per-gesture score set
matches a ground truth derived from verification error rates: rank
deviation, rank-parametrized relevance, trend match distance, and
embedding entanglement, fused into the (normalized) advanced acceptance
score, alongside adapted retrieval baselines and a harness for
selection, correlation, and scaling-factor sweeps.
"""

from .core import (
    ArrangedScores,
    DEFAULT_PARAMS,
    MeasureParams,
    Ranking,
    ScoreVector,
    arrange_by_ground_truth,
    ground_truth_from_eer,
    rank_descending,
    zscore_l2_normalize,
)
from .errors import (
    GbqEvalError,
    InputValidationError,
    SchemaError,
    SingularGeometryError,
    UndefinedCorrelationError,
    UndefinedMeasureError,
)
from .measures import (
    MeasureRecord,
    TrendComponents,
    acceptance_score,
    advanced_acceptance,
    advanced_acceptance_reference,
    normalized_advanced_acceptance,
    penalty_entanglement,
    penalty_trend,
    rank_deviation,
    relevance_per_gesture,
    relevance_total,
    trend_match,
)
from .embeddings import (
    EmbeddingSet,
    GesturePartition,
    dgbqa_scores,
    dgbqa_value,
    icgd_mask,
    icgd_score,
    uniqueness_variability,
)
from .baselines import (
    ADAPTATION_VERSION,
    BASELINE_DIRECTIONS,
    BASELINE_KINDS,
    GradeMap,
    all_baselines,
    baseline_measure,
)
from .harness import (
    CANONICAL_MEASURES,
    MEASURE_DIRECTIONS,
    ModelRun,
    SelectionResult,
    SweepGrid,
    ablation_sweep,
    criteria_table,
    evaluate_run,
    evaluate_runs,
    load_runs,
    pearson_correlation,
    select_best,
    spearman_correlation,
)
from .synth import (
    EmbeddingSpec,
    ScorePerturbation,
    degradation_family,
    perturb_scores,
    synth_embeddings,
)

__version__ = "0.1.0"
