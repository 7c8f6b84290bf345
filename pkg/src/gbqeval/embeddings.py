"""Embedding-level quantities: entanglement (ICGD), uniqueness,
variability, and the per-gesture quality scores derived from them.

Rows are unit-normalized before any similarity or distance is taken;
the entanglement score is then a mean of nonnegative cosine
similarities and stays in [0, 1], and Euclidean distances on the unit
sphere are monotone in cosine distance. Identity centroids are plain
arithmetic means of the normalized rows; re-normalizing them back onto
the sphere is available as an option but off by default.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import STATE_RAW, ScoreVector
from .errors import InputValidationError, SingularGeometryError


@dataclass(eq=False)
class EmbeddingSet:
    """N feature rows, each labeled with a gesture and an identity."""

    rows: np.ndarray
    gesture_labels: tuple[str, ...]
    identity_labels: tuple[str, ...]

    def __post_init__(self):
        self.rows = np.asarray(self.rows, dtype=float)
        self.gesture_labels = tuple(str(g) for g in self.gesture_labels)
        self.identity_labels = tuple(str(i) for i in self.identity_labels)
        if self.rows.ndim != 2:
            raise InputValidationError("embedding rows must form an N x d matrix")
        n, d = self.rows.shape
        if n < 1 or d < 1:
            raise InputValidationError("embedding set needs N >= 1 rows of d >= 1 dims")
        if len(self.gesture_labels) != n or len(self.identity_labels) != n:
            raise InputValidationError("every row needs a gesture and an identity label")
        if not np.all(np.isfinite(self.rows)):
            raise InputValidationError("embedding values must be finite")

    @property
    def n(self) -> int:
        return self.rows.shape[0]

    @property
    def dim(self) -> int:
        return self.rows.shape[1]

    def gestures(self) -> tuple[str, ...]:
        """Distinct gesture labels in first-appearance order."""
        return tuple(dict.fromkeys(self.gesture_labels))

    def identities(self) -> tuple[str, ...]:
        return tuple(dict.fromkeys(self.identity_labels))

    def unit_rows(self) -> np.ndarray:
        """Rows scaled to unit norm; zero rows are rejected."""
        norms = np.linalg.norm(self.rows, axis=1)
        bad = np.flatnonzero(norms == 0.0)
        if bad.size:
            raise InputValidationError(f"zero-norm embedding row at index {bad[0]}")
        return self.rows / norms[:, None]


@dataclass(eq=False)
class GesturePartition:
    """Uniqueness/variability of one gesture cluster.

    ``d_unq`` is None when the gesture has fewer than two identities;
    ``d_vrb`` is None when no identity contributes two or more samples.
    """

    gesture: str
    d_unq: float | None
    d_vrb: float | None


def icgd_mask(emb: EmbeddingSet, identity: str) -> np.ndarray:
    """Literal N x N binary mask for one identity.

    Entry (m, n) is 1 iff the rows differ, their dot product (after unit
    normalization) is nonnegative, and both rows carry this identity but
    different gestures. Symmetric with a zero diagonal.
    """
    if identity not in emb.identity_labels:
        raise InputValidationError(f"unknown identity {identity!r}")
    unit = emb.unit_rows()
    gram = unit @ unit.T
    ids = np.array(emb.identity_labels)
    gestures = np.array(emb.gesture_labels)
    same_identity = (ids[:, None] == identity) & (ids[None, :] == identity)
    cross_gesture = gestures[:, None] != gestures[None, :]
    mask = same_identity & cross_gesture & (gram >= 0.0)
    np.fill_diagonal(mask, False)
    return mask.astype(np.uint8)


def icgd_score(emb: EmbeddingSet) -> float:
    """Mean positive cross-gesture same-identity cosine similarity.

    Per identity, the masked Gram entries are averaged over the mask
    count; identities with an empty mask contribute 0 instead of
    dividing by zero. The outer mean runs over all identities present,
    so the result lies in [0, 1].
    """
    unit = emb.unit_rows()
    ids = np.array(emb.identity_labels)
    gestures = np.array(emb.gesture_labels)
    total = 0.0
    identities = emb.identities()
    for identity in identities:
        idx = np.flatnonzero(ids == identity)
        if idx.size < 2:
            continue
        sub = unit[idx]
        gram = sub @ sub.T
        cross = gestures[idx][:, None] != gestures[idx][None, :]
        mask = cross & (gram >= 0.0)
        np.fill_diagonal(mask, False)
        count = int(mask.sum())
        if count:
            total += float(gram[mask].sum()) / count
    return total / len(identities)


def _centroids(
    unit: np.ndarray, identity_rows: dict[str, np.ndarray], renormalize: bool
) -> dict[str, np.ndarray]:
    cents = {}
    for identity, idx in identity_rows.items():
        c = unit[idx].mean(axis=0)
        if renormalize:
            norm = np.linalg.norm(c)
            if norm == 0.0:
                raise SingularGeometryError(
                    f"identity {identity!r} centroid collapses to the origin"
                )
            c = c / norm
        cents[identity] = c
    return cents


def _distance(a: np.ndarray, b: np.ndarray, metric: str) -> float:
    if metric == "euclidean":
        return float(np.linalg.norm(a - b))
    if metric == "cosine":
        na, nb = np.linalg.norm(a), np.linalg.norm(b)
        if na == 0.0 or nb == 0.0:
            raise SingularGeometryError("cosine distance undefined for zero vectors")
        return float(1.0 - np.dot(a, b) / (na * nb))
    raise InputValidationError(f"unknown distance metric {metric!r}")


def uniqueness_variability(
    emb: EmbeddingSet,
    gesture: str,
    distance: str = "euclidean",
    renormalize_centroids: bool = False,
) -> GesturePartition:
    """Uniqueness and variability of one gesture cluster.

    Uniqueness is the all-pairs mean distance between identity centroids
    inside the gesture cluster; variability is the mean distance of each
    sample to its identity centroid, averaged over all identities
    present (single-sample identities contribute 0). Quantities that
    lack the samples to be meaningful come back as None.
    """
    if gesture not in emb.gesture_labels:
        raise InputValidationError(f"unknown gesture {gesture!r}")
    unit = emb.unit_rows()
    in_gesture = np.flatnonzero(np.array(emb.gesture_labels) == gesture)
    identity_rows: dict[str, np.ndarray] = {}
    for i in in_gesture:
        identity_rows.setdefault(emb.identity_labels[i], []).append(i)
    identity_rows = {k: np.array(v) for k, v in identity_rows.items()}
    cents = _centroids(unit, identity_rows, renormalize_centroids)

    identities = list(identity_rows)
    d_unq = None
    if len(identities) >= 2:
        pair_dists = [
            _distance(cents[identities[a]], cents[identities[b]], distance)
            for a in range(len(identities))
            for b in range(a + 1, len(identities))
        ]
        d_unq = float(np.mean(pair_dists))

    d_vrb = None
    if any(idx.size >= 2 for idx in identity_rows.values()):
        per_identity = [
            float(np.mean([_distance(unit[i], cents[identity], distance) for i in idx]))
            for identity, idx in identity_rows.items()
        ]
        d_vrb = float(np.mean(per_identity))

    return GesturePartition(gesture, d_unq, d_vrb)


def dgbqa_value(d_unq: float, d_vrb: float) -> float:
    """Per-gesture quality score exp(d_unq - d_vrb) - d_vrb/d_unq."""
    if d_unq <= 0.0:
        raise SingularGeometryError("uniqueness must be > 0 for a quality score")
    return float(np.exp(d_unq - d_vrb) - d_vrb / d_unq)


def dgbqa_scores(
    emb: EmbeddingSet,
    distance: str = "euclidean",
    renormalize_centroids: bool = False,
) -> ScoreVector:
    """Raw per-gesture quality scores over all gestures in the set.

    Gestures appear in first-appearance order. A gesture whose cluster
    cannot support both quantities, or whose uniqueness is zero, names
    itself in the raised error. Normalize the result via
    :func:`gbqeval.core.zscore_l2_normalize` before feeding measures.
    """
    gestures = emb.gestures()
    values = []
    for gesture in gestures:
        part = uniqueness_variability(emb, gesture, distance, renormalize_centroids)
        if part.d_unq is None:
            raise SingularGeometryError(
                f"gesture {gesture!r} has fewer than two identities"
            )
        if part.d_vrb is None:
            raise SingularGeometryError(
                f"gesture {gesture!r} has no identity with two or more samples"
            )
        if part.d_unq == 0.0:
            raise SingularGeometryError(
                f"gesture {gesture!r} has zero uniqueness (coincident identity centroids)"
            )
        values.append(dgbqa_value(part.d_unq, part.d_vrb))
    return ScoreVector(gestures, np.array(values), STATE_RAW)
