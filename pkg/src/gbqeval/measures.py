"""The proposed measure suite: rank deviation, relevance, trend match
distance, penalty forms, and the (normalized) advanced acceptance score.

All functions are pure and operate on normalized score vectors from
:mod:`gbqeval.core`. The advanced acceptance score composes the pieces
multiplicatively:

    A* = [sum_j 2^(lambda*R_j) / exp(kappa*|r_j - r'_j|)]
         / sqrt(log2(2 + nu*Psi)) * exp(-beta*C_d)

and its normalized form divides by the same sum evaluated on the ground
truth itself (no penalties), so a perfect score set with zero
entanglement scores exactly 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import (
    ArrangedScores,
    MeasureParams,
    DEFAULT_PARAMS,
    Ranking,
    ScoreVector,
    arrange_by_ground_truth,
    rank_descending,
    require_comparable,
    require_min_gestures,
)
from .errors import InputValidationError, UndefinedMeasureError


@dataclass(eq=False)
class TrendComponents:
    """Per-gesture trend errors from both traversal directions.

    ``forward_errors[i]`` holds the error for arranged position j=i+2
    (forward pass covers j=2..G); ``backward_errors[i]`` holds position
    j=i+1 (backward pass covers j=1..G-1). ``total`` is the aggregate
    with endpoint errors double-counted, halved.
    """

    forward_errors: np.ndarray
    backward_errors: np.ndarray
    total: float

    def __post_init__(self):
        self.forward_errors = np.asarray(self.forward_errors, dtype=float)
        self.backward_errors = np.asarray(self.backward_errors, dtype=float)


@dataclass
class MeasureRecord:
    """Full measure-suite result for one candidate score set.

    ``entanglement`` stays ``None`` when no embeddings were available;
    the aggregate scores then treat it as zero and ``provenance`` records
    the gap. ``extras`` holds replayed measures that have no dedicated
    field (fixture criteria annotations, variant combination rows).
    """

    run_id: str
    rank_dev: float | None = None
    relevance: float | None = None
    trend: float | None = None
    entanglement: float | None = None
    acceptance: float | None = None
    advanced: float | None = None
    normalized_advanced: float | None = None
    baselines: dict[str, float] = field(default_factory=dict)
    provenance: dict[str, str] = field(default_factory=dict)
    extras: dict[str, float] = field(default_factory=dict)

    _FIELD_NAMES = {
        "rank_dev": "rank_dev",
        "relevance": "relevance",
        "trend": "trend",
        "icgd": "entanglement",
        "acceptance": "acceptance",
        "Ar_star": "advanced",
        "nAr_star": "normalized_advanced",
    }

    def value(self, measure: str) -> float | None:
        """Look up a measure by its canonical name, if present."""
        attr = self._FIELD_NAMES.get(measure)
        if attr is not None:
            return getattr(self, attr)
        if measure in self.baselines:
            return self.baselines[measure]
        return self.extras.get(measure)

    def set_value(self, measure: str, value: float, provenance: str) -> None:
        attr = self._FIELD_NAMES.get(measure)
        if attr is not None:
            setattr(self, attr, value)
        else:
            self.extras[measure] = value
        self.provenance[measure] = provenance


def rank_deviation(r_out: Ranking, r_gt: Ranking) -> float:
    """Mean absolute rank difference between the two rankings."""
    if set(r_out.rank_of) != set(r_gt.rank_of):
        raise InputValidationError("rankings cover different gesture sets")
    g = r_out.size
    total = sum(abs(r_out.rank_of[gid] - r_gt.rank_of[gid]) for gid in r_out.rank_of)
    return total / g


def relevance_per_gesture(
    delta_arranged: ArrangedScores, gt_rank: int, params: MeasureParams = DEFAULT_PARAMS
) -> float:
    """Rank-parametrized reward for the gesture at ground-truth rank ``gt_rank``.

    R = gamma*((G-r+1)/G)*d + (r/G)*(1-d) with d the score of that
    gesture: high scores are rewarded at high ranks, low scores at low
    ranks, with gamma keeping negative tail scores from dominating.
    """
    g = delta_arranged.size
    d = delta_arranged.score_at_rank(gt_rank)
    r = gt_rank
    return params.gamma * ((g - r + 1) / g) * d + (r / g) * (1.0 - d)


def _relevance_by_rank(
    delta: ScoreVector, gt: Ranking, params: MeasureParams
) -> np.ndarray:
    """Relevance values indexed by ground-truth rank (entry 0 = rank 1)."""
    arranged = arrange_by_ground_truth(delta, gt)
    g = arranged.size
    d = arranged.values[::-1]  # entry 0 = rank-1 gesture
    ranks = np.arange(1, g + 1, dtype=float)
    return params.gamma * ((g - ranks + 1) / g) * d + (ranks / g) * (1.0 - d)


def relevance_total(
    delta: ScoreVector, gt: Ranking, params: MeasureParams = DEFAULT_PARAMS
) -> float:
    """Overall relevance: the per-gesture rewards summed over all ranks."""
    return float(np.sum(_relevance_by_rank(delta, gt, params)))


def trend_match(
    delta_arranged: ArrangedScores, gt_arranged: ArrangedScores
) -> TrendComponents:
    """Trend match distance between arranged scores and ground truth.

    Each pass predicts a ground-truth value from its neighbor plus the
    local score difference and accumulates the absolute prediction error:

        forward  (j=2..G):   |e_{j-1} + (d_j - d_{j-1}) - e_j|
        backward (j=1..G-1): |e_{j+1} - (d_{j+1} - d_j) - e_j|

    The endpoints are visited by only one pass, so their errors are
    doubled before halving the sum. Undefined for a single gesture.
    """
    require_comparable(delta_arranged, gt_arranged)
    g = delta_arranged.size
    require_min_gestures(2, g, "trend match distance")
    d = delta_arranged.values
    e = gt_arranged.values
    dd = d[1:] - d[:-1]
    # grouped so the passes are exact IEEE negations of each other,
    # keeping the provable symmetry bwd_j == fwd_{j+1} bit-exact
    fwd = np.abs((e[:-1] - e[1:]) + dd)
    bwd = np.abs((e[1:] - e[:-1]) - dd)
    middle = float(np.sum(fwd[:-1]) + np.sum(bwd[1:]))  # j = 2..G-1 in both passes
    total = (middle + 2.0 * (fwd[-1] + bwd[0])) / 2.0
    return TrendComponents(fwd, bwd, total)


def penalty_entanglement(c_d: float, params: MeasureParams = DEFAULT_PARAMS) -> float:
    """Entanglement discount exp(-beta*C_d), in (0, 1]."""
    if c_d < 0:
        raise InputValidationError("entanglement score must be >= 0")
    return math.exp(-params.beta * c_d)


def penalty_trend(psi: float, params: MeasureParams = DEFAULT_PARAMS) -> float:
    """Trend discount 1/sqrt(log2(2 + nu*Psi)), in (0, 1]."""
    if psi < 0:
        raise InputValidationError("trend distance must be >= 0")
    return 1.0 / math.sqrt(math.log2(2.0 + params.nu * psi))


def _rank_diffs_by_rank(delta: ScoreVector, gt: Ranking) -> np.ndarray:
    """|r^delta - r^gt| per gesture, indexed by ground-truth rank."""
    r_delta = rank_descending(delta)
    diffs = np.empty(gt.size)
    for gid, r in gt.rank_of.items():
        diffs[r - 1] = abs(r_delta.rank_of[gid] - r)
    return diffs


def acceptance_score(
    delta: ScoreVector, gt: ScoreVector, params: MeasureParams = DEFAULT_PARAMS
) -> float:
    """Prior aggregate: exponential relevance over the raw rank difference.

    The printed form divides by the bare rank difference, which is zero
    for correctly placed gestures; the divisor is floored at 1 so exact
    matches keep their full reward and the measure stays finite.
    """
    gt_ranking = rank_descending(gt)
    rel = _relevance_by_rank(delta, gt_ranking, params)
    diffs = _rank_diffs_by_rank(delta, gt_ranking)
    return float(np.sum(2.0 ** (params.lambda_ * rel) / np.maximum(1.0, diffs)))


def advanced_acceptance(
    delta: ScoreVector,
    gt: ScoreVector,
    c_d: float | None = None,
    params: MeasureParams = DEFAULT_PARAMS,
) -> float:
    """Holistic aggregate of relevance, rank, trend, and entanglement.

    A missing entanglement score is treated as zero (penalty factor 1);
    callers that care about the distinction report it separately.
    """
    gt_ranking = rank_descending(gt)
    rel = _relevance_by_rank(delta, gt_ranking, params)
    diffs = _rank_diffs_by_rank(delta, gt_ranking)
    numerator = float(np.sum(2.0 ** (params.lambda_ * rel) / np.exp(params.kappa * diffs)))
    psi = trend_match(
        arrange_by_ground_truth(delta, gt_ranking),
        arrange_by_ground_truth(gt, gt_ranking),
    ).total
    entanglement = 0.0 if c_d is None else c_d
    return numerator * penalty_trend(psi, params) * penalty_entanglement(entanglement, params)


def advanced_acceptance_reference(
    gt: ScoreVector, params: MeasureParams = DEFAULT_PARAMS
) -> float:
    """Normalization reference: the exponential relevance sum of the
    ground truth against itself, with no penalty terms."""
    gt_ranking = rank_descending(gt)
    rel = _relevance_by_rank(gt, gt_ranking, params)
    return float(np.sum(2.0 ** (params.lambda_ * rel)))


def normalized_advanced_acceptance(
    delta: ScoreVector,
    gt: ScoreVector,
    c_d: float | None = None,
    params: MeasureParams = DEFAULT_PARAMS,
) -> float:
    """Advanced acceptance score divided by its ground-truth reference.

    Always positive; equals 1 when the scores reproduce the ground truth
    exactly and no entanglement penalty applies.
    """
    if gt.degenerate:
        raise UndefinedMeasureError(
            "normalized advanced acceptance is undefined for a degenerate ground truth"
        )
    return advanced_acceptance(delta, gt, c_d, params) / advanced_acceptance_reference(
        gt, params
    )
