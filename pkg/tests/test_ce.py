"""Cross-entropy round mechanics: sampling, percentile, update, selection."""

import math

import numpy as np
import pytest

from fedfs.ce import (
    CEParams,
    ce_round,
    clamp_probs,
    compute_gamma,
    evaluate_objective,
    sample_masks,
    select_features,
    uniform_probs,
    update_probabilities,
)
from fedfs.info import conditional_entropy


class TestSampleMasks:
    def test_near_degenerate(self):
        eps = 1e-6
        masks = sample_masks(np.array([1.0 - eps, eps]), 3, rng_seed=0)
        assert masks.tolist() == [[1, 0]] * 3

    def test_frequency_concentration(self):
        masks = sample_masks(np.array([0.5]), 10_000, rng_seed=42)
        freq = masks.mean()
        assert 0.48 <= freq <= 0.52

    def test_determinism(self):
        p = np.array([0.2, 0.8, 0.5])
        a = sample_masks(p, 50, rng_seed=[7, 3])
        b = sample_masks(p, 50, rng_seed=[7, 3])
        assert np.array_equal(a, b)

    def test_distinct_streams_for_distinct_rounds(self):
        p = np.array([0.5] * 8)
        a = sample_masks(p, 50, rng_seed=[7, 1])
        b = sample_masks(p, 50, rng_seed=[7, 2])
        assert not np.array_equal(a, b)

    def test_count_must_be_positive(self):
        with pytest.raises(ValueError):
            sample_masks(np.array([0.5]), 0, rng_seed=0)


class TestComputeGamma:
    def test_nearest_rank(self):
        assert compute_gamma([0.1, 0.2, 0.8, 0.9], beta=0.9) == 0.1

    def test_constant_list(self):
        assert compute_gamma([0.5, 0.5, 0.5], beta=0.3) == 0.5

    def test_singleton(self):
        assert compute_gamma([0.3], beta=0.95) == 0.3

    def test_unsorted_input(self):
        assert compute_gamma([0.9, 0.1, 0.8, 0.2], beta=0.9) == 0.1

    def test_lower_beta_moves_gamma_up(self):
        values = [float(v) for v in range(10)]
        assert compute_gamma(values, beta=0.5) == 4.0

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            compute_gamma([], beta=0.9)


class TestUpdateProbabilities:
    def test_worked_example(self):
        p = np.array([0.5, 0.5])
        masks = np.array([[1, 0], [1, 1], [0, 1], [0, 0]])
        objectives = [0.1, 0.2, 0.9, 0.8]
        out = update_probabilities(p, masks, objectives, gamma=0.2, alpha=0.5)
        assert out.tolist() == [0.75, 0.5]

    def test_alpha_zero_is_identity(self):
        p = np.array([0.3, 0.7])
        masks = np.array([[1, 1], [0, 0]])
        out = update_probabilities(p, masks, [0.0, 1.0], gamma=0.0, alpha=0.0)
        assert np.allclose(out, p)

    def test_alpha_one_all_elite_is_raw_frequency(self):
        p = np.array([0.1, 0.9, 0.5])
        masks = np.array([[1, 0, 1], [1, 1, 0], [0, 0, 1], [1, 0, 0]])
        out = update_probabilities(p, masks, [1.0] * 4, gamma=1.0, alpha=1.0)
        assert np.allclose(out, masks.mean(axis=0))

    def test_ties_at_gamma_included(self):
        masks = np.array([[1, 0], [0, 1]])
        out = update_probabilities(np.array([0.5, 0.5]), masks, [0.2, 0.2], 0.2, 1.0)
        assert np.allclose(out, [0.5, 0.5])

    def test_empty_elite_is_internal_error(self):
        masks = np.array([[1, 0]])
        with pytest.raises(RuntimeError):
            update_probabilities(np.array([0.5, 0.5]), masks, [0.5], gamma=0.1, alpha=0.5)

    def test_output_clamped(self):
        masks = np.array([[1, 1], [1, 1]])
        out = update_probabilities(np.array([1.0, 1.0]), masks, [0.0, 0.0], 0.0, 1.0)
        assert np.all(out <= 1.0 - 1e-6)

    def test_input_not_modified(self):
        p = np.array([0.5, 0.5])
        masks = np.array([[1, 0], [0, 1]])
        update_probabilities(p, masks, [0.1, 0.9], gamma=0.1, alpha=1.0)
        assert p.tolist() == [0.5, 0.5]

    def test_convex_combination_bounds(self):
        rng = np.random.default_rng(8)
        for _ in range(50):
            m = int(rng.integers(1, 6))
            s = int(rng.integers(2, 20))
            p = rng.random(m)
            masks = rng.integers(0, 2, size=(s, m))
            objectives = rng.random(s)
            gamma = compute_gamma(objectives, 0.7)
            alpha = float(rng.uniform(0.05, 1.0))
            out = update_probabilities(p, masks, objectives, gamma, alpha)
            # Convex combination of two vectors in [0, 1], then clamped.
            assert np.all(out >= 1e-6 - 1e-15)
            assert np.all(out <= 1.0 - 1e-6 + 1e-15)
            elite = masks[np.asarray(objectives) <= gamma]
            raw = (1.0 - alpha) * p + alpha * elite.mean(axis=0)
            assert np.allclose(out, np.clip(raw, 1e-6, 1.0 - 1e-6))


class TestCeRound:
    def test_fixed_point_at_converged_vector(self, xor_dataset):
        eps = 1e-6
        params = CEParams(sample_count=50, beta=0.9, alpha=0.7, rng_seed=1)
        p_in = np.full(2, 1.0 - eps)
        out = ce_round(xor_dataset, p_in, params)
        assert np.all(out >= 1.0 - eps - 0.7 * eps - 1e-12)

    def test_deterministic(self, xor_noise_dataset):
        params = CEParams(sample_count=40, rng_seed=13)
        a = ce_round(xor_noise_dataset, uniform_probs(3), params, round_index=2)
        b = ce_round(xor_noise_dataset, uniform_probs(3), params, round_index=2)
        assert np.array_equal(a, b)

    def test_matches_hand_rolled_oracle(self, xor_noise_dataset):
        # Replays the exact seeded sampling, then applies the elite-frequency
        # update by hand; the module must agree bitwise.
        params = CEParams(sample_count=30, beta=0.8, alpha=0.6, rng_seed=5)
        p_in = uniform_probs(3)
        ours = ce_round(xor_noise_dataset, p_in, params, round_index=4)

        masks = sample_masks(p_in, 30, [5, 4])
        objectives = [conditional_entropy(xor_noise_dataset, m) for m in masks]
        gamma = sorted(objectives)[math.ceil((1.0 - 0.8) * 30) - 1]
        elite = [m for m, o in zip(masks, objectives) if o <= gamma]
        freq = np.mean(elite, axis=0)
        expected = np.clip(0.4 * p_in + 0.6 * freq, 1e-6, 1.0 - 1e-6)
        assert ours.tolist() == expected.tolist()

    def test_best_objective_non_increasing_when_chained(self, xor_noise_dataset):
        params = CEParams(sample_count=60, beta=0.9, alpha=0.7, rng_seed=21)
        p1 = ce_round(xor_noise_dataset, uniform_probs(3), params, round_index=1)
        best1 = min(
            evaluate_objective(xor_noise_dataset, m)
            for m in sample_masks(uniform_probs(3), 60, [21, 1])
        )
        best2 = min(
            evaluate_objective(xor_noise_dataset, m)
            for m in sample_masks(p1, 60, [21, 2])
        )
        assert best2 <= best1 + 1e-12

    def test_schedule_mode_uses_small_alpha(self, xor_noise_dataset):
        # alpha = 1/(1*3) on round 1, so the vector moves at most 1/3 of the way.
        params = CEParams(sample_count=30, alpha_mode="schedule", rng_seed=2)
        out = ce_round(xor_noise_dataset, uniform_probs(3), params, round_index=1)
        assert np.all(np.abs(out - 0.5) <= 1.0 / 3.0 + 1e-12)

    def test_length_mismatch(self, xor_dataset):
        with pytest.raises(ValueError):
            ce_round(xor_dataset, uniform_probs(3), CEParams())

    def test_planted_full_relevant_mask_scores_zero(self, planted50):
        mask = np.zeros(50, dtype=np.int64)
        mask[[0, 1, 2, 3]] = 1
        assert evaluate_objective(planted50, mask) <= 1e-12


class TestSelectFeatures:
    def test_threshold_pick(self):
        assert select_features(np.array([0.995, 0.5, 0.991]), 0.99) == [0, 2]

    def test_uniform_selects_nothing(self):
        assert select_features(np.full(10, 0.5), 0.99) == []

    def test_strictly_greater_than_threshold(self):
        assert select_features(np.array([0.99, 0.991]), 0.99) == [1]

    def test_threshold_validated(self):
        with pytest.raises(ValueError):
            select_features(np.array([0.5]), 0.4)


class TestParamsValidation:
    @pytest.mark.parametrize(
        "kwargs",
        [
            {"sample_count": 1},
            {"beta": 0.0},
            {"beta": 1.0},
            {"alpha": 0.0},
            {"alpha": 1.5},
            {"alpha_mode": "other"},
            {"clamp_eps": 0.5},
        ],
    )
    def test_rejects_bad_values(self, kwargs):
        with pytest.raises(ValueError):
            CEParams(**kwargs)


def test_clamp_probs_bounds():
    out = clamp_probs(np.array([-1.0, 0.5, 2.0]), eps=1e-3)
    assert out.tolist() == [1e-3, 0.5, 1.0 - 1e-3]
