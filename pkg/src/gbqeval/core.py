"""Domain types, score normalization, and ranking primitives.

Every measure in this package operates on per-gesture score vectors that
have been rescaled with z-score normalization followed by l2
normalization, so scores live in [-1, 1] with zero mean and unit norm.
Ground truth is built from equal error rates as ``100 - EER`` before the
same rescaling, so a lower error rate yields a higher ground-truth score.

Conventions fixed here and relied on everywhere else:

* z-scores use the population standard deviation (divide by G);
* zero-variance inputs normalize to the all-zero vector and are flagged
  ``degenerate`` instead of raising, keeping parameter sweeps total;
* descending sorts break ties by input position, so rankings are
  deterministic across runs;
* "arranged" vectors are indexed by ascending order of merit: index G
  (1-based) holds the score of the top-ranked gesture.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import InputValidationError, UndefinedMeasureError

STATE_RAW = "raw"
STATE_NORMALIZED = "normalized"
STATE_GROUND_TRUTH = "ground_truth"

_VALID_STATES = (STATE_RAW, STATE_NORMALIZED, STATE_GROUND_TRUTH)

NORM_TOL = 1e-9


@dataclass(eq=False)
class ScoreVector:
    """G per-gesture real scores with their gesture identifiers.

    ``state`` tracks whether the values are raw, normalized, or a
    normalized ground truth; ``degenerate`` marks the all-zero vector
    produced from zero-variance input.
    """

    gesture_ids: tuple[str, ...]
    values: np.ndarray
    state: str = STATE_RAW
    degenerate: bool = False

    def __post_init__(self):
        self.gesture_ids = tuple(str(g) for g in self.gesture_ids)
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 1:
            raise InputValidationError("score values must be one-dimensional")
        if len(self.gesture_ids) != self.values.shape[0]:
            raise InputValidationError(
                f"{len(self.gesture_ids)} gesture ids for {self.values.shape[0]} values"
            )
        if len(self.gesture_ids) == 0:
            raise InputValidationError("a score vector needs at least one gesture")
        if len(set(self.gesture_ids)) != len(self.gesture_ids):
            raise InputValidationError("gesture ids must be unique")
        if self.state not in _VALID_STATES:
            raise InputValidationError(f"unknown score state {self.state!r}")
        if not np.all(np.isfinite(self.values)):
            raise InputValidationError("score values must be finite")

    @property
    def size(self) -> int:
        return self.values.shape[0]

    def value_of(self, gesture_id: str) -> float:
        try:
            return float(self.values[self.gesture_ids.index(gesture_id)])
        except ValueError:
            raise InputValidationError(f"unknown gesture id {gesture_id!r}") from None

    def validate(self) -> None:
        """Check the normalization invariants for the current state."""
        if self.state == STATE_RAW:
            return
        if self.degenerate:
            if np.any(self.values != 0.0):
                raise InputValidationError("degenerate vectors must be all-zero")
            return
        norm = float(np.linalg.norm(self.values))
        mean = float(np.mean(self.values))
        if abs(norm - 1.0) > NORM_TOL:
            raise InputValidationError(f"normalized vector has norm {norm}, expected 1")
        if abs(mean) > NORM_TOL:
            raise InputValidationError(f"normalized vector has mean {mean}, expected 0")
        if np.any(np.abs(self.values) > 1.0 + NORM_TOL):
            raise InputValidationError("normalized values must lie in [-1, 1]")


@dataclass(frozen=True)
class Ranking:
    """Bijective map gesture_id -> rank in 1..G, rank 1 being the best."""

    rank_of: dict[str, int]

    def __post_init__(self):
        ranks = sorted(self.rank_of.values())
        if ranks != list(range(1, len(self.rank_of) + 1)):
            raise InputValidationError("ranks must be a bijection onto 1..G")

    @property
    def size(self) -> int:
        return len(self.rank_of)

    def rank(self, gesture_id: str) -> int:
        try:
            return self.rank_of[gesture_id]
        except KeyError:
            raise InputValidationError(f"unknown gesture id {gesture_id!r}") from None

    def gesture_at(self, rank: int) -> str:
        for gid, r in self.rank_of.items():
            if r == rank:
                return gid
        raise InputValidationError(f"rank {rank} out of range 1..{self.size}")

    def gestures_by_rank(self) -> tuple[str, ...]:
        """Gesture ids ordered rank 1 first."""
        return tuple(sorted(self.rank_of, key=self.rank_of.get))


@dataclass(eq=False)
class ArrangedScores:
    """Scores permuted into ascending ground-truth merit order.

    ``values[j-1]`` (1-based j) is the score of the gesture holding
    ground-truth rank G-j+1, so the last entry belongs to the top-ranked
    gesture. ``gesture_order`` records the permutation and doubles as
    provenance: two arrangements are comparable only if it matches.
    """

    values: np.ndarray
    gesture_order: tuple[str, ...]

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        self.gesture_order = tuple(self.gesture_order)
        if self.values.shape[0] != len(self.gesture_order):
            raise InputValidationError("arranged values and gesture order disagree")

    @property
    def size(self) -> int:
        return self.values.shape[0]

    def score_at_rank(self, rank: int) -> float:
        """Score of the gesture with ground-truth rank ``rank``."""
        g = self.size
        if not 1 <= rank <= g:
            raise InputValidationError(f"rank {rank} out of range 1..{g}")
        return float(self.values[g - rank])

    def as_mapping(self) -> dict[str, float]:
        return {gid: float(v) for gid, v in zip(self.gesture_order, self.values)}


@dataclass(frozen=True)
class MeasureParams:
    """Scaling and weighting factors shared by the measure suite.

    Defaults are the published operating point: lambda=2, kappa=1, nu=1,
    beta=0.75, gamma=2.
    """

    lambda_: float = 2.0
    kappa: float = 1.0
    nu: float = 1.0
    beta: float = 0.75
    gamma: float = 2.0

    def __post_init__(self):
        if self.lambda_ <= 0:
            raise InputValidationError("lambda must be > 0")
        if self.gamma <= 0:
            raise InputValidationError("gamma must be > 0")
        for name in ("kappa", "nu", "beta"):
            if getattr(self, name) < 0:
                raise InputValidationError(f"{name} must be >= 0")

    def replace(self, **kwargs) -> "MeasureParams":
        merged = {
            "lambda_": self.lambda_,
            "kappa": self.kappa,
            "nu": self.nu,
            "beta": self.beta,
            "gamma": self.gamma,
        }
        merged.update(kwargs)
        return MeasureParams(**merged)


DEFAULT_PARAMS = MeasureParams()


def zscore_l2_normalize(scores: ScoreVector, *, state: str = STATE_NORMALIZED) -> ScoreVector:
    """Z-score the values (population std) and scale to unit l2 norm.

    A zero-variance input maps to the all-zero vector with
    ``degenerate=True`` rather than raising, so sweeps over poor score
    sets stay total. The result is invariant under positive affine
    transforms of the input.
    """
    if state not in (STATE_NORMALIZED, STATE_GROUND_TRUTH):
        raise InputValidationError(f"cannot normalize into state {state!r}")
    v = scores.values
    centered = v - v.mean()
    std = float(np.sqrt(np.mean(centered**2)))
    if std == 0.0:
        return ScoreVector(scores.gesture_ids, np.zeros_like(v), state, degenerate=True)
    z = centered / std
    out = z / np.linalg.norm(z)
    return ScoreVector(scores.gesture_ids, out, state)


def ground_truth_from_eer(
    gesture_ids: Sequence[str], eer_percent: Iterable[float]
) -> ScoreVector:
    """Build the normalized ground truth from per-gesture EER percentages.

    Applies ``100 - EER`` so a lower error rate scores higher, then the
    standard normalization. Entries must lie in [0, 100].
    """
    eer = np.asarray(list(eer_percent), dtype=float)
    if np.any(~np.isfinite(eer)) or np.any(eer < 0.0) or np.any(eer > 100.0):
        raise InputValidationError("EER values must lie in [0, 100]")
    raw = ScoreVector(tuple(gesture_ids), 100.0 - eer, STATE_RAW)
    return zscore_l2_normalize(raw, state=STATE_GROUND_TRUTH)


def rank_descending(scores: ScoreVector) -> Ranking:
    """Rank gestures by descending score; ties keep input order.

    Rank 1 is the largest value. The tie rule makes rankings a pure
    function of (values, id order), independent of sort implementation.
    """
    order = sorted(range(scores.size), key=lambda i: (-scores.values[i], i))
    return Ranking({scores.gesture_ids[i]: pos + 1 for pos, i in enumerate(order)})


def arrange_by_ground_truth(scores: ScoreVector, gt: Ranking) -> ArrangedScores:
    """Permute scores into ascending ground-truth merit order.

    Index j (1-based) receives the score of the gesture ranked G-j+1 in
    the ground truth, so the best gesture lands at the end.
    """
    if set(scores.gesture_ids) != set(gt.rank_of):
        missing = set(scores.gesture_ids) ^ set(gt.rank_of)
        raise InputValidationError(
            f"scores and ranking cover different gestures: {sorted(missing)}"
        )
    g = scores.size
    by_rank = gt.gestures_by_rank()
    order = tuple(by_rank[g - j] for j in range(1, g + 1))  # rank G first, rank 1 last
    values = np.array([scores.value_of(gid) for gid in order])
    return ArrangedScores(values, order)


def require_comparable(a: ArrangedScores, b: ArrangedScores) -> None:
    """Two arrangements enter a measure only if built from one ranking."""
    if a.gesture_order != b.gesture_order:
        raise InputValidationError(
            "arranged vectors were not produced by the same ground-truth ranking"
        )


def require_min_gestures(n: int, size: int, what: str) -> None:
    if size < n:
        raise UndefinedMeasureError(f"{what} is undefined for G={size} (needs G>={n})")
