"""One cross-entropy optimization round over Bernoulli feature masks.

A round samples S candidate masks from the current per-feature Bernoulli
probability vector, scores each mask by the conditional entropy of the labels
given the masked features, keeps the elite fraction with the lowest scores,
and pulls the probability vector toward the elite selection frequencies with
smoothing factor alpha.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .info import DiscreteDataset, conditional_entropy

# Keeps every mask reachable: the frequency update alone can pin a
# probability to exactly 0 or 1, which freezes exploration.
DEFAULT_CLAMP = 1e-6
DEFAULT_THRESHOLD = 0.99


@dataclass(frozen=True)
class CEParams:
    """Knobs for one optimization round.

    ``alpha_mode`` is either "fixed" (use ``alpha`` as-is) or "schedule"
    (per-round alpha of 1/(t*m), see :func:`fedfs.bounds.alpha_schedule`).
    """

    sample_count: int = 100
    beta: float = 0.9
    alpha: float = 0.7
    alpha_mode: str = "fixed"
    clamp_eps: float = DEFAULT_CLAMP
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if self.sample_count < 2:
            raise ValueError("sample_count must be at least 2")
        if not 0.0 < self.beta < 1.0:
            raise ValueError("beta must be in (0, 1)")
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError("alpha must be in (0, 1]")
        if self.alpha_mode not in ("fixed", "schedule"):
            raise ValueError("alpha_mode must be 'fixed' or 'schedule'")
        if not 0.0 < self.clamp_eps < 0.5:
            raise ValueError("clamp_eps must be in (0, 0.5)")


def clamp_probs(p: np.ndarray, eps: float = DEFAULT_CLAMP) -> np.ndarray:
    """Clip a probability vector into [eps, 1-eps]."""
    return np.clip(np.asarray(p, dtype=np.float64), eps, 1.0 - eps)


def uniform_probs(m: int) -> np.ndarray:
    """The standard all-0.5 initialization."""
    return np.full(m, 0.5)


def sample_masks(p: np.ndarray, count: int, rng_seed) -> np.ndarray:
    """Draw ``count`` independent Bernoulli masks; bit i is 1 with probability p[i].

    ``rng_seed`` is anything ``numpy.random.default_rng`` accepts, so callers
    can pass entropy lists like ``[seed, round]`` for derived streams.
    """
    p = np.asarray(p, dtype=np.float64)
    if count < 1:
        raise ValueError("count must be positive")
    rng = np.random.default_rng(rng_seed)
    return (rng.random((count, p.shape[0])) < p).astype(np.uint8)


def evaluate_objective(dataset: DiscreteDataset, mask: np.ndarray) -> float:
    """Score a mask: conditional entropy of the labels given the masked features."""
    return conditional_entropy(dataset, mask)


def compute_gamma(objectives: Sequence[float], beta: float) -> float:
    """Nearest-rank (1-beta)-percentile of the objective values.

    Sort ascending and take the element at index ceil((1-beta)*S)-1, clamped
    into range; this guarantees at least one sample scores <= gamma.
    """
    values = sorted(objectives)
    if not values:
        raise ValueError("objectives must be non-empty")
    if not 0.0 < beta < 1.0:
        raise ValueError("beta must be in (0, 1)")
    idx = math.ceil((1.0 - beta) * len(values)) - 1
    return values[min(max(idx, 0), len(values) - 1)]


def update_probabilities(
    p: np.ndarray,
    masks: np.ndarray,
    objectives: Sequence[float],
    gamma: float,
    alpha: float,
    eps: float = DEFAULT_CLAMP,
) -> np.ndarray:
    """Pull p toward the per-feature frequency over the elite masks.

    Elite masks are those with objective <= gamma (weak inequality, so ties
    at gamma are included). The new vector is (1-alpha)*p + alpha*frequency,
    clamped into [eps, 1-eps]; the input is not modified.
    """
    p = np.asarray(p, dtype=np.float64)
    masks = np.asarray(masks)
    objectives = np.asarray(objectives, dtype=np.float64)
    if masks.shape != (objectives.shape[0], p.shape[0]):
        raise ValueError("masks, objectives and p have inconsistent shapes")
    elite = objectives <= gamma
    if not elite.any():
        raise RuntimeError("empty elite set; gamma must be a sampled objective value")
    freq = masks[elite].mean(axis=0)
    return clamp_probs((1.0 - alpha) * p + alpha * freq, eps)


def ce_round(
    dataset: DiscreteDataset,
    p_in: np.ndarray,
    params: CEParams,
    round_index: int = 1,
) -> np.ndarray:
    """Execute one sample -> score -> percentile -> update cycle.

    Deterministic given (dataset, p_in, params, round_index): the sampling
    stream is derived from the seed and the round index.
    """
    p_in = np.asarray(p_in, dtype=np.float64)
    if p_in.shape[0] != dataset.m:
        raise ValueError("probability vector length must equal feature count")
    if params.alpha_mode == "schedule":
        from .bounds import alpha_schedule

        alpha = alpha_schedule(round_index, dataset.m)
    else:
        alpha = params.alpha
    masks = sample_masks(p_in, params.sample_count, [params.rng_seed, round_index])
    objectives = [evaluate_objective(dataset, mask) for mask in masks]
    gamma = compute_gamma(objectives, params.beta)
    return update_probabilities(p_in, masks, objectives, gamma, alpha, params.clamp_eps)


def select_features(p: np.ndarray, threshold: float = DEFAULT_THRESHOLD) -> list[int]:
    """Indices whose selection probability exceeds the threshold, ascending."""
    if not 0.5 < threshold < 1.0:
        raise ValueError("threshold must be in (0.5, 1)")
    return [int(i) for i in np.flatnonzero(np.asarray(p) > threshold)]
