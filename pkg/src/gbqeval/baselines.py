"""Retrieval-style comparison measures adapted to score-vector pairs.

Each measure is computed from a candidate score vector and the
normalized ground truth over the same gestures. Positions k index the
candidate-induced descending ranking; gains and grades at position k
come from the ground-truth value of the gesture placed there, so the
measures reward placing genuinely strong gestures early.

These adaptations keep each cited measure's standard published form and
only substitute ground-truth-derived gains/grades; the adaptation
version string below travels with every report so numbers are never
silently compared across conventions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import ScoreVector, rank_descending
from .errors import InputValidationError, UndefinedMeasureError

ADAPTATION_VERSION = "baselines-v1"

# Fixed optimization direction per measure kind.
BASELINE_DIRECTIONS: dict[str, str] = {
    "rmse": "min",
    "cosine": "max",
    "dcg": "max",
    "kendall_tau": "min",
    "err": "max",
    "u_measure": "max",
    "gre": "min",
    "inf_ap": "max",
    "neg_rel_dcg": "max",
    "rpp": "max",
}

BASELINE_KINDS: tuple[str, ...] = tuple(BASELINE_DIRECTIONS)

_PAIRWISE_KINDS = {"kendall_tau", "rpp"}


@dataclass(frozen=True)
class GradeMap:
    """Maps a normalized score in [-1, 1] onto an integer grade.

    grade(s) = round(((s+1)/2) * g_max), clamped to [0, g_max]; the
    default g_max of 4 gives the common five-level graded-relevance
    scale. Python's banker's rounding applies at exact half-grades.
    """

    g_max: int = 4

    def __post_init__(self):
        if self.g_max < 1:
            raise InputValidationError("g_max must be >= 1")

    def grade(self, score: float) -> int:
        g = round(((score + 1.0) / 2.0) * self.g_max)
        return int(min(max(g, 0), self.g_max))


def _check_pair(delta: ScoreVector, gt: ScoreVector) -> None:
    if set(delta.gesture_ids) != set(gt.gesture_ids):
        raise InputValidationError("score vectors cover different gesture sets")


def _gt_in_delta_order(delta: ScoreVector, gt: ScoreVector) -> np.ndarray:
    """Ground-truth values of the gestures at candidate positions 1..G."""
    order = rank_descending(delta).gestures_by_rank()
    return np.array([gt.value_of(gid) for gid in order])


def _pair_counts(delta: ScoreVector, gt: ScoreVector) -> tuple[int, int]:
    """(concordant, discordant) gesture pairs; ties count as neither."""
    d = np.array([delta.value_of(g) for g in gt.gesture_ids])
    e = gt.values
    g = len(e)
    concordant = discordant = 0
    for i in range(g):
        for j in range(i + 1, g):
            s = (d[i] - d[j]) * (e[i] - e[j])
            if s > 0:
                concordant += 1
            elif s < 0:
                discordant += 1
    return concordant, discordant


def _rmse(delta: ScoreVector, gt: ScoreVector) -> float:
    d = np.array([delta.value_of(g) for g in gt.gesture_ids])
    return float(np.sqrt(np.mean((d - gt.values) ** 2)))


def _cosine(delta: ScoreVector, gt: ScoreVector) -> float:
    d = np.array([delta.value_of(g) for g in gt.gesture_ids])
    return float(np.dot(d, gt.values))


def _dcg(delta: ScoreVector, gt: ScoreVector) -> float:
    gains = (_gt_in_delta_order(delta, gt) + 1.0) / 2.0
    ks = np.arange(1, len(gains) + 1)
    return float(np.sum(gains / np.log2(ks + 1)))


def _neg_rel_dcg(delta: ScoreVector, gt: ScoreVector) -> float:
    gains = _gt_in_delta_order(delta, gt)  # signed gains, negatives admitted
    ks = np.arange(1, len(gains) + 1)
    return float(np.sum(gains / np.log2(ks + 1)))


def _kendall_tau(delta: ScoreVector, gt: ScoreVector) -> float:
    _, discordant = _pair_counts(delta, gt)
    return float(discordant)


def _rpp(delta: ScoreVector, gt: ScoreVector) -> float:
    concordant, _ = _pair_counts(delta, gt)
    g = gt.size
    return concordant / (g * (g - 1) / 2)


def _err(delta: ScoreVector, gt: ScoreVector, grades: GradeMap) -> float:
    stop = np.array(
        [
            (2.0 ** grades.grade(v) - 1.0) / 2.0**grades.g_max
            for v in _gt_in_delta_order(delta, gt)
        ]
    )
    total = 0.0
    not_stopped = 1.0
    for k, r in enumerate(stop, start=1):
        total += (1.0 / k) * r * not_stopped
        not_stopped *= 1.0 - r
    return total


def _u_measure(delta: ScoreVector, gt: ScoreVector) -> float:
    gains = (_gt_in_delta_order(delta, gt) + 1.0) / 2.0
    g = len(gains)
    ks = np.arange(1, g + 1)
    weights = np.maximum(0.0, 1.0 - (ks - 1) / g)
    return float(np.sum(gains * weights))


def _gre(delta: ScoreVector, gt: ScoreVector) -> float:
    r_delta = rank_descending(delta)
    r_gt = rank_descending(gt)
    total = 0.0
    for gid in gt.gesture_ids:
        r = r_gt.rank_of[gid]
        total += abs(r_delta.rank_of[gid] - r) / math.log2(1.0 + r)
    return total


def _inf_ap(delta: ScoreVector, gt: ScoreVector) -> float:
    g = gt.size
    n_rel = math.ceil(g / 2)
    relevant = set(rank_descending(gt).gestures_by_rank()[:n_rel])
    hits = 0
    precision_sum = 0.0
    for k, gid in enumerate(rank_descending(delta).gestures_by_rank(), start=1):
        if gid in relevant:
            hits += 1
            precision_sum += hits / k
    return precision_sum / n_rel


def baseline_measure(
    kind: str,
    delta: ScoreVector,
    gt: ScoreVector,
    grades: GradeMap | None = None,
) -> float:
    """Evaluate one adapted baseline measure on a (candidate, truth) pair."""
    if kind not in BASELINE_DIRECTIONS:
        raise InputValidationError(
            f"unknown baseline {kind!r}; expected one of {', '.join(BASELINE_KINDS)}"
        )
    _check_pair(delta, gt)
    if kind in _PAIRWISE_KINDS and gt.size < 2:
        raise UndefinedMeasureError(f"{kind} needs at least two gestures")
    if kind == "rmse":
        return _rmse(delta, gt)
    if kind == "cosine":
        return _cosine(delta, gt)
    if kind == "dcg":
        return _dcg(delta, gt)
    if kind == "kendall_tau":
        return _kendall_tau(delta, gt)
    if kind == "err":
        return _err(delta, gt, grades or GradeMap())
    if kind == "u_measure":
        return _u_measure(delta, gt)
    if kind == "gre":
        return _gre(delta, gt)
    if kind == "inf_ap":
        return _inf_ap(delta, gt)
    if kind == "neg_rel_dcg":
        return _neg_rel_dcg(delta, gt)
    return _rpp(delta, gt)


def all_baselines(
    delta: ScoreVector, gt: ScoreVector, grades: GradeMap | None = None
) -> dict[str, float]:
    """Every baseline measure, keyed by canonical name in fixed order."""
    return {kind: baseline_measure(kind, delta, gt, grades) for kind in BASELINE_KINDS}
