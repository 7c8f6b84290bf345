"""Controlled synthetic generators for property testing.

Two generator families:

* score perturbations that degrade a ground-truth vector by adjacent
  swaps, additive Gaussian noise, and a monotone trend warp;
* embedding sets with gesture/identity cluster structure and a tunable
  entanglement knob rho that interpolates between per-gesture private
  identity directions (rho=0) and identity directions shared across
  gestures (rho=1).

All randomness flows through numpy's PCG64 generator seeded from the
spec, so a given spec reproduces its output bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ScoreVector, rank_descending, zscore_l2_normalize
from .embeddings import EmbeddingSet
from .errors import InputValidationError


@dataclass(frozen=True)
class ScorePerturbation:
    """Degradation recipe for a score vector; the seed pins the output."""

    adjacent_swaps: int = 0
    noise_sigma: float = 0.0
    trend_warp: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.adjacent_swaps < 0:
            raise InputValidationError("adjacent_swaps must be >= 0")
        if self.noise_sigma < 0:
            raise InputValidationError("noise_sigma must be >= 0")
        if self.trend_warp < 0:
            raise InputValidationError("trend_warp must be >= 0")


@dataclass(frozen=True)
class EmbeddingSpec:
    """Shape and geometry of a synthetic embedding set.

    ``separation`` spaces identity centroids, ``spread`` is the
    within-identity sample noise, and ``entanglement_rho`` in [0, 1]
    blends shared versus private identity directions across gestures.
    """

    gestures: int
    identities: int
    samples_per_cell: int
    dim: int
    separation: float = 1.0
    spread: float = 0.1
    entanglement_rho: float = 0.0
    seed: int = 0

    def __post_init__(self):
        for name in ("gestures", "identities", "samples_per_cell", "dim"):
            if getattr(self, name) < 1:
                raise InputValidationError(f"{name} must be a positive integer")
        if self.separation < 0 or self.spread < 0:
            raise InputValidationError("separation and spread must be >= 0")
        if not 0.0 <= self.entanglement_rho <= 1.0:
            raise InputValidationError("entanglement_rho must lie in [0, 1]")


def perturb_scores(gt: ScoreVector, p: ScorePerturbation) -> ScoreVector:
    """Degrade a non-degenerate ground truth and renormalize.

    Swaps cascade down the ranking from the top (swap k exchanges the
    values at ranked positions k+1 and k+2, wrapping), noise is additive
    Gaussian, and the warp raises min-max rescaled values to the power
    1 + trend_warp, which preserves order but bends the trend. With all
    knobs at zero the input comes back unchanged (up to renormalization
    round-off).
    """
    if gt.degenerate:
        raise InputValidationError("cannot perturb a degenerate score vector")
    rng = np.random.default_rng(p.seed)
    values = gt.values.copy()
    g = gt.size

    if p.adjacent_swaps and g >= 2:
        by_rank = rank_descending(gt).gestures_by_rank()
        idx = [gt.gesture_ids.index(gid) for gid in by_rank]
        for k in range(p.adjacent_swaps):
            a = idx[k % (g - 1)]
            b = idx[k % (g - 1) + 1]
            values[a], values[b] = values[b], values[a]

    if p.noise_sigma:
        values = values + p.noise_sigma * rng.standard_normal(g)

    if p.trend_warp:
        lo, hi = values.min(), values.max()
        if hi > lo:
            values = ((values - lo) / (hi - lo)) ** (1.0 + p.trend_warp)

    return zscore_l2_normalize(ScoreVector(gt.gesture_ids, values))


def _unit(rng: np.random.Generator, shape: tuple[int, ...]) -> np.ndarray:
    v = rng.standard_normal(shape)
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def synth_embeddings(spec: EmbeddingSpec) -> EmbeddingSet:
    """Generate an embedding set with identity clusters per gesture.

    All gestures share a common anchor at the origin; identity centroids
    sit at separation * (rho * shared_dir + sqrt(1-rho^2) * private_dir)
    where the shared direction is fixed per identity and the private one
    is redrawn per (gesture, identity). Samples add isotropic Gaussian
    spread. Rows come out unnormalized; the metrics normalize.
    """
    rng = np.random.default_rng(spec.seed)
    rho = spec.entanglement_rho
    shared = _unit(rng, (spec.identities, spec.dim))
    private = _unit(rng, (spec.gestures, spec.identities, spec.dim))
    mix = rho * shared[None, :, :] + np.sqrt(1.0 - rho * rho) * private
    centroids = spec.separation * mix

    rows = []
    gesture_labels = []
    identity_labels = []
    for g in range(spec.gestures):
        for i in range(spec.identities):
            samples = centroids[g, i] + spec.spread * rng.standard_normal(
                (spec.samples_per_cell, spec.dim)
            )
            rows.append(samples)
            gesture_labels.extend([f"g{g + 1}"] * spec.samples_per_cell)
            identity_labels.extend([f"s{i + 1}"] * spec.samples_per_cell)
    return EmbeddingSet(np.vstack(rows), tuple(gesture_labels), tuple(identity_labels))


def degradation_family(
    gt: ScoreVector, n_runs: int = 24, seed: int = 0, noise_step: float = 0.04
) -> list[tuple[str, ScoreVector]]:
    """A family of score sets degrading smoothly away from the truth.

    Run k carries noise k * noise_step and one extra adjacent swap every
    fourth run, so rank and trend quality both decay with k. Useful for
    correlation studies across the measure suite.
    """
    runs = []
    for k in range(n_runs):
        p = ScorePerturbation(
            adjacent_swaps=k // 4,
            noise_sigma=k * noise_step,
            seed=seed * 100003 + k,
        )
        runs.append((f"degraded-{k:02d}", perturb_scores(gt, p)))
    return runs
