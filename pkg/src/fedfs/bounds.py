"""Convergence bounds for the cross-entropy search and their Monte-Carlo check.

The bounds upper-bound the probability that no sampled mask up to a horizon
t' equals the unique optimal mask, for the smoothing schedule alpha_t =
1/(t*m). The Monte-Carlo runner measures the same miss event empirically on
tiny datasets where the optimum is found by exhaustive search.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .ce import (
    CEParams,
    compute_gamma,
    evaluate_objective,
    sample_masks,
    uniform_probs,
    update_probabilities,
)
from .info import DiscreteDataset, NEG_CLAMP


def alpha_schedule(round_index: int, m: int) -> float:
    """Per-round smoothing factor 1/(t*m); its slow decay drives the guarantee."""
    if round_index < 1 or m < 1:
        raise ValueError("round_index and m must be positive")
    return 1.0 / (round_index * m)


@dataclass(frozen=True)
class BoundInputs:
    """Terms of the miss-probability bounds.

    ``p0`` is the scalar uniform initialization; ``optimal_mask`` identifies
    the unique optimum; ``alpha_seq`` overrides the 1/(t*m) schedule when
    given. ``per_node_m_l`` and ``weights`` describe the federated variant:
    how many entries each node's local optimum may differ by, and the node
    mixture weights.
    """

    t_prime: int
    sample_count: int
    optimal_mask: tuple[int, ...]
    p0: float = 0.5
    alpha_seq: Optional[tuple[float, ...]] = None
    per_node_m_l: Optional[tuple[int, ...]] = None
    weights: Optional[tuple[float, ...]] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "optimal_mask", tuple(int(b) for b in self.optimal_mask))
        if self.t_prime < 0:
            raise ValueError("t_prime must be non-negative")
        if self.sample_count < 1:
            raise ValueError("sample_count must be positive")
        if any(b not in (0, 1) for b in self.optimal_mask) or not self.optimal_mask:
            raise ValueError("optimal_mask must be a non-empty binary tuple")
        if not 0.0 < self.p0 < 1.0:
            raise ValueError("p0 must be in (0, 1)")
        if self.alpha_seq is not None:
            object.__setattr__(self, "alpha_seq", tuple(self.alpha_seq))
            if any(not 0.0 <= a < 1.0 for a in self.alpha_seq):
                raise ValueError("alpha_seq entries must be in [0, 1)")
        if self.per_node_m_l is not None:
            object.__setattr__(self, "per_node_m_l", tuple(self.per_node_m_l))
            if any(ml < 0 or ml > self.m for ml in self.per_node_m_l):
                raise ValueError("each per-node entry count must be in [0, m]")
        if self.weights is not None:
            object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))

    @property
    def m(self) -> int:
        return len(self.optimal_mask)

    def alpha(self, j: int) -> float:
        if self.alpha_seq is not None:
            return self.alpha_seq[j - 1] if j - 1 < len(self.alpha_seq) else self.alpha_seq[-1]
        return alpha_schedule(j, self.m)

    def first_draw_hit_probability(self) -> float:
        """Probability that a single initial draw equals the optimal mask."""
        ones = sum(self.optimal_mask)
        return self.p0**ones * (1.0 - self.p0) ** (self.m - ones)


def _decay(inputs: BoundInputs, tau: int, exponent: int) -> float:
    """prod_{j=1}^{tau-1} (1 - alpha_j)**exponent."""
    prod = 1.0
    for j in range(1, tau):
        prod *= (1.0 - inputs.alpha(j)) ** exponent
    return prod


def centralized_miss_bound(inputs: BoundInputs) -> float:
    """Upper bound on the probability no sample equals the optimum by t'."""
    if inputs.t_prime == 0:
        return 1.0
    p_hit = inputs.first_draw_hit_probability()
    bound = 1.0 - p_hit
    for tau in range(2, inputs.t_prime + 1):
        bound *= (1.0 - p_hit * _decay(inputs, tau, inputs.m)) ** inputs.sample_count
    return min(max(bound, 0.0), 1.0)


@dataclass(frozen=True)
class FederatedBound:
    value: float
    clamped: bool


def federated_miss_bound(inputs: BoundInputs) -> FederatedBound:
    """Weighted mixture of per-node miss bounds for the federated variant.

    The binomial factor can push a per-node factor above 1 at small
    horizons; such factors are clamped to 1 and the result is flagged.
    """
    if inputs.per_node_m_l is None or inputs.weights is None:
        raise ValueError("per_node_m_l and weights are required")
    if len(inputs.per_node_m_l) != len(inputs.weights):
        raise ValueError("per_node_m_l and weights must have equal length")
    if abs(sum(inputs.weights) - 1.0) > 1e-9:
        raise ValueError("weights must sum to 1")
    if inputs.t_prime == 0:
        return FederatedBound(1.0, False)
    p_hit = inputs.first_draw_hit_probability()
    clamped = False
    total = 0.0
    for m_l, weight in zip(inputs.per_node_m_l, inputs.weights):
        binom = math.comb(inputs.m, m_l)
        first = binom * p_hit * (1.0 - p_hit)
        if first > 1.0:
            first = 1.0
            clamped = True
        node = first
        for tau in range(2, inputs.t_prime + 1):
            factor = (
                binom
                * p_hit
                * _decay(inputs, tau, inputs.m - m_l)
                * (1.0 - p_hit * _decay(inputs, tau, m_l))
            )
            if factor > 1.0:
                factor = 1.0
                clamped = True
            node *= factor**inputs.sample_count
        total += weight * node
    return FederatedBound(min(max(total, 0.0), 1.0), clamped)


def find_optimal_mask(dataset: DiscreteDataset) -> np.ndarray:
    """Exhaustively locate the unique minimal-cardinality objective minimizer.

    Ties on the objective are broken by cardinality (a superset of an
    optimal mask scores the same); a tie at the minimal cardinality means
    the optimum is not unique and is rejected.
    """
    if dataset.m > 4:
        raise ValueError("exhaustive search supports at most 4 features")
    best_value = math.inf
    masks = []
    for code in range(2**dataset.m):
        mask = np.array([(code >> i) & 1 for i in range(dataset.m)], dtype=np.uint8)
        value = evaluate_objective(dataset, mask)
        if value < best_value - NEG_CLAMP:
            best_value = value
            masks = [mask]
        elif value <= best_value + NEG_CLAMP:
            masks.append(mask)
    min_ones = min(int(mask.sum()) for mask in masks)
    winners = [mask for mask in masks if int(mask.sum()) == min_ones]
    if len(winners) != 1:
        raise ValueError("multiple optimal masks; the bound assumes a unique optimum")
    return winners[0]


def miss_rate_curve(
    dataset: DiscreteDataset,
    params: CEParams,
    t_max: int,
    trials: int,
    p0: Optional[np.ndarray] = None,
) -> list[float]:
    """Observed miss rates for every horizon 1..t_max from seeded trials.

    Trial s uses streams derived from (params.rng_seed, s, round); a trial
    misses horizon t' when none of its samples up to round t' equals the
    exhaustively-found optimum.
    """
    if trials < 100:
        raise ValueError("need at least 100 trials for a meaningful rate")
    optimum = find_optimal_mask(dataset)
    init = uniform_probs(dataset.m) if p0 is None else np.asarray(p0, dtype=np.float64)
    misses = np.zeros(t_max, dtype=np.int64)
    for s in range(trials):
        p = init.copy()
        hit_round = None
        for t in range(1, t_max + 1):
            masks = sample_masks(p, params.sample_count, [params.rng_seed, s, t])
            if np.any(np.all(masks == optimum, axis=1)):
                hit_round = t
                break
            objectives = [evaluate_objective(dataset, mask) for mask in masks]
            gamma = compute_gamma(objectives, params.beta)
            alpha = (
                alpha_schedule(t, dataset.m)
                if params.alpha_mode == "schedule"
                else params.alpha
            )
            p = update_probabilities(p, masks, objectives, gamma, alpha, params.clamp_eps)
        for t in range(1, t_max + 1):
            if hit_round is None or hit_round > t:
                misses[t - 1] += 1
    return [float(c) / trials for c in misses]


def monte_carlo_miss_rate(
    dataset: DiscreteDataset,
    params: CEParams,
    t_prime: int,
    trials: int,
    p0: Optional[np.ndarray] = None,
) -> float:
    """Fraction of seeded runs in which no sample up to t' hits the optimum.

    A zero horizon draws nothing, so the miss rate is 1 by convention.
    """
    if t_prime == 0:
        return 1.0
    return miss_rate_curve(dataset, params, t_prime, trials, p0)[t_prime - 1]
