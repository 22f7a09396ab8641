import math
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from subnet_walk.datasets import LabeledDataset, make_gaussian_blobs
from subnet_walk.masks import Mask, sample_mask
from subnet_walk.metrics import (
    ContributionRecord,
    contribution_score,
    dataset_loss,
    ensemble_average_output,
    ensemble_scaling_gap,
    ensemble_softmax,
    ensemble_stats,
    entropy_split_by_correctness,
    expected_output_by_enumeration,
    masked_norm_stats,
    output_variance,
    predictive_entropy,
    scaled_output,
)
from subnet_walk.network import LINEAR, Network, forward, init_mlp
from subnet_walk.rng import SeededRng


class TestContributionScore:
    def test_same_dataset_gives_exact_zero(self, trained_relu, blobs):
        train_ds, _ = blobs
        rec = contribution_score(trained_relu, Mask.ones(trained_relu.d), train_ds, train_ds)
        assert rec.score == 0.0

    def test_zero_mask_on_balanced_data_scores_zero(self):
        # an all-zero subnetwork outputs zero logits: loss is ln(k) everywhere
        train_ds, test_ds = make_gaussian_blobs(10, 10, 2, 5.0, seed=1)
        net = init_mlp([2, 4, 10], "relu", SeededRng(0))
        rec = contribution_score(net, Mask.zeros(net.d), train_ds, test_ds)
        assert rec.train_loss == pytest.approx(math.log(10), abs=1e-12)
        assert rec.test_loss == pytest.approx(math.log(10), abs=1e-12)
        assert rec.score == pytest.approx(0.0, abs=1e-12)

    def test_matches_independent_two_pass_evaluator(self, trained_relu, blobs):
        train_ds, test_ds = blobs
        rec = contribution_score(trained_relu, Mask.ones(trained_relu.d), train_ds, test_ds)

        def mean_ce(ds):
            total = 0.0
            for x, y in zip(ds.inputs, ds.labels):
                z = forward(trained_relu, x)
                total += math.log(np.exp(z - z.max()).sum()) + z.max() - z[y]
            return total / ds.n

        expected = mean_ce(test_ds) - mean_ce(train_ds)
        assert rec.score == pytest.approx(expected, abs=1e-10)

    def test_swap_negates_exactly(self, trained_relu, blobs):
        train_ds, test_ds = blobs
        m = sample_mask(trained_relu.d, 0.8, SeededRng(1))
        a = contribution_score(trained_relu, m, train_ds, test_ds)
        b = contribution_score(trained_relu, m, test_ds, train_ds)
        assert a.score == -b.score

    def test_record_invariant_enforced(self):
        with pytest.raises(ValueError):
            ContributionRecord(Mask.ones(2), 0.5, 1.0, 0.4)
        with pytest.raises(ValueError):
            ContributionRecord(Mask.ones(2), float("nan"), 1.0, 1.0)


class TestEnsembleAverage:
    def test_single_all_ones_equals_forward(self, trained_relu):
        x = np.array([1.0, -2.0])
        out = ensemble_average_output(trained_relu, [Mask.ones(trained_relu.d)], x)
        np.testing.assert_array_equal(out, forward(trained_relu, x))

    def test_duplicated_mask_idempotent(self, trained_relu):
        x = np.array([0.5, 0.5])
        m = sample_mask(trained_relu.d, 0.7, SeededRng(2))
        one = ensemble_average_output(trained_relu, [m], x)
        two = ensemble_average_output(trained_relu, [m, m], x)
        np.testing.assert_allclose(one, two, rtol=1e-15)

    def test_empty_list_rejected(self, trained_relu):
        with pytest.raises(ValueError):
            ensemble_average_output(trained_relu, [], np.zeros(2))

    def test_monte_carlo_tracks_scaled_output(self, trained_linear):
        # CLT: the ensemble mean lies within 3 standard errors of the scaled
        # forward pass, per coordinate
        x = np.array([1.5, -0.5])
        rng = SeededRng(3)
        masks = [sample_mask(trained_linear.d, 0.8, rng) for _ in range(1000)]
        outs = np.stack([forward(trained_linear, x, m) for m in masks])
        se = outs.std(axis=0, ddof=1) / math.sqrt(len(masks))
        gap = np.abs(outs.mean(axis=0) - scaled_output(trained_linear, 0.8, x))
        assert (gap <= 3 * se).all()


class TestScaledOutput:
    def test_p_one_identity(self, trained_relu):
        x = np.array([2.0, 3.0])
        np.testing.assert_array_equal(scaled_output(trained_relu, 1.0, x), forward(trained_relu, x))

    def test_p_zero_annihilates(self, trained_relu):
        np.testing.assert_array_equal(scaled_output(trained_relu, 0.0, np.ones(2)), np.zeros(2))

    def test_single_layer_scalar_multiple(self):
        net = Network((np.eye(2),), (np.zeros(2),), LINEAR)
        np.testing.assert_allclose(
            scaled_output(net, 0.8, np.array([5.0, -5.0])), [4.0, -4.0], atol=1e-15
        )


class TestEnumeratedExpectation:
    def test_matches_independent_weighted_enumeration(self):
        # independent oracle: raw matmuls over all masks, built in the test
        net = init_mlp([2, 2, 2], LINEAR, SeededRng(7))
        x = np.array([0.3, -1.2])
        d = net.d
        w0, w1 = net.weights
        b0, b1 = net.biases
        p = 0.8
        acc = np.zeros(2)
        for bits in product((0, 1), repeat=d):
            bits = np.array(bits, dtype=float)
            mw0 = bits[0:4].reshape(2, 2)
            mb0 = bits[4:6]
            mw1 = bits[6:10].reshape(2, 2)
            mb1 = bits[10:12]
            k = bits.sum()
            weight = p**k * (1 - p) ** (d - k)
            h = (w0 * mw0) @ x + b0 * mb0
            acc = acc + weight * ((w1 * mw1) @ h + b1 * mb1)
        np.testing.assert_allclose(
            expected_output_by_enumeration(net, p, x), acc, atol=1e-12
        )

    def test_exact_identity_for_affine_nets(self):
        # the expectation equals the p-scaled forward pass, to enumeration exactness
        net = init_mlp([2, 2, 2], LINEAR, SeededRng(8))
        xs = SeededRng(9).standard_normal((3, 2))
        gap = np.abs(expected_output_by_enumeration(net, 0.8, xs) - scaled_output(net, 0.8, xs))
        assert gap.max() <= 1e-10

    def test_d_limit(self):
        net = init_mlp([4, 4, 4], LINEAR, SeededRng(0))
        with pytest.raises(ValueError):
            expected_output_by_enumeration(net, 0.5, np.zeros(4))


class TestEnsembleScalingGap:
    def test_rejects_relu(self, trained_relu):
        with pytest.raises(ValueError):
            ensemble_scaling_gap(trained_relu, [Mask.ones(trained_relu.d)], 0.8, np.zeros((1, 2)))

    def test_p_one_all_ones_gap_zero(self, trained_linear):
        _, mean_gap = ensemble_scaling_gap(
            trained_linear, [Mask.ones(trained_linear.d)], 1.0, np.zeros((2, 2))
        )
        assert mean_gap == 0.0

    def test_gap_shrinks_with_more_masks(self, trained_linear):
        xs = SeededRng(10).standard_normal((50, 2))
        rng = SeededRng(11)
        masks_small = [sample_mask(trained_linear.d, 0.8, rng) for _ in range(100)]
        rng2 = SeededRng(12)
        masks_big = [sample_mask(trained_linear.d, 0.8, rng2) for _ in range(1600)]
        _, small = ensemble_scaling_gap(trained_linear, masks_small, 0.8, xs)
        _, big = ensemble_scaling_gap(trained_linear, masks_big, 0.8, xs)
        assert big < small


class TestMaskedNormStats:
    def test_theoretical_value(self):
        theta = np.full(25, 2.0)  # ||theta||^2 = 100
        _, theoretical = masked_norm_stats(theta, 0.8, 1, SeededRng(0))
        assert theoretical == pytest.approx(80.0, abs=1e-12)

    def test_p_one_exact_every_sample(self):
        theta = SeededRng(1).standard_normal(50)
        empirical, theoretical = masked_norm_stats(theta, 1.0, 100, SeededRng(2))
        assert empirical == pytest.approx(theoretical, rel=1e-15)

    def test_relative_error_at_scale(self):
        # estimator std / mean ~ sqrt((1-p)/(p d n)) ~ 5e-4 here, so 1% is generous
        theta = SeededRng(3).standard_normal(1000)
        empirical, theoretical = masked_norm_stats(theta, 0.8, 10000, SeededRng(4))
        assert abs(empirical - theoretical) / theoretical < 0.01

    def test_per_coordinate_identity(self):
        theta = SeededRng(5).standard_normal(64)
        _, theoretical = masked_norm_stats(theta, 0.37, 1, SeededRng(0))
        per_coord = sum(t * t * 0.37 for t in theta)
        assert theoretical == pytest.approx(per_coord, abs=1e-12)


class TestEnsembleStats:
    def test_all_ones_mask_trivial(self, trained_relu, blobs):
        _, test_ds = blobs
        st_ = ensemble_stats(trained_relu, [Mask.ones(trained_relu.d)], test_ds)
        assert st_.mse_logits == 0.0 and st_.kl_softmax == pytest.approx(0.0, abs=1e-12)
        assert st_.match_rate == 1.0

    def test_kl_shift_invariance(self):
        # constant logit shifts do not change softmax, hence zero KL
        net = Network((np.eye(2),), (np.zeros(2),), LINEAR)
        shifted = Network((np.eye(2),), (np.full(2, 3.5),), LINEAR)
        x = np.array([[0.7, -0.7]])
        p = np.exp(forward(net, x)) / np.exp(forward(net, x)).sum()
        q = np.exp(forward(shifted, x)) / np.exp(forward(shifted, x)).sum()
        np.testing.assert_allclose(p, q, atol=1e-12)


class TestPredictiveEntropy:
    def test_identical_confident_masks(self):
        # both entropies -> 0 when every mask yields the same near-one-hot softmax
        net = Network((np.diag([50.0, 50.0]),), (np.zeros(2),), LINEAR)
        masks = [Mask.ones(net.d)] * 3
        mean_ent, per_mask = predictive_entropy(net, masks, np.array([1.0, 0.0]))
        assert mean_ent == pytest.approx(0.0, abs=1e-12)
        assert per_mask == pytest.approx(0.0, abs=1e-12)

    def test_uniform_average_is_log_k(self):
        net = Network((np.zeros((4, 2)),), (np.zeros(4),), LINEAR)
        mean_ent, _ = predictive_entropy(net, [Mask.ones(net.d)], np.ones(2))
        assert mean_ent == pytest.approx(math.log(4), abs=1e-12)

    def test_two_opposed_confident_masks(self):
        # softmaxes (1,0) and (0,1): mean is (0.5, 0.5) with entropy ln 2;
        # per-mask entropies are ~0
        net = Network((np.array([[60.0, 0.0], [0.0, 60.0]]),), (np.zeros(2),), LINEAR)
        x = np.array([1.0, 1.0])
        # masks keeping only one diagonal weight each
        m_a = Mask(np.array([1, 0, 0, 0, 0, 0]))  # logits (60, 0)
        m_b = Mask(np.array([0, 0, 0, 1, 0, 0]))  # logits (0, 60)
        mean_ent, per_mask = predictive_entropy(net, [m_a, m_b], x)
        assert mean_ent == pytest.approx(math.log(2), abs=1e-10)
        assert per_mask == pytest.approx(0.0, abs=1e-10)

    def test_entropy_bounds_property(self, trained_relu, blobs):
        _, test_ds = blobs
        rng = SeededRng(14)
        masks = [sample_mask(trained_relu.d, 0.8, rng) for _ in range(20)]
        mean_probs, per_mask = ensemble_softmax(trained_relu, masks, test_ds.inputs[:50])
        ent = -(np.where(mean_probs > 0, mean_probs * np.log(mean_probs), 0.0)).sum(axis=1)
        assert (ent >= -1e-12).all()
        assert (ent <= math.log(test_ds.num_classes) + 1e-12).all()
        assert (per_mask >= -1e-12).all()

    def test_output_variance_zero_for_identical_masks(self, trained_relu):
        m = Mask.ones(trained_relu.d)
        assert output_variance(trained_relu, [m, m], np.ones(2)) == 0.0


class TestEntropySplit:
    def test_all_correct_side_absent(self):
        net = Network((np.diag([10.0, 10.0]),), (np.zeros(2),), LINEAR)
        ds = LabeledDataset(np.array([[1.0, 0.0], [0.0, 1.0]]), np.array([0, 1]), 2)
        correct, incorrect = entropy_split_by_correctness(net, [Mask.ones(net.d)], ds)
        assert incorrect is None and correct is not None

    def test_single_correct_example_mean_is_its_entropy(self):
        net = Network((np.diag([2.0, 2.0]),), (np.zeros(2),), LINEAR)
        ds = LabeledDataset(np.array([[1.0, 0.0]]), np.array([0]), 2)
        masks = [Mask.ones(net.d)]
        correct, incorrect = entropy_split_by_correctness(net, masks, ds)
        expected, _ = predictive_entropy(net, masks, ds.inputs[0])
        assert incorrect is None and correct == pytest.approx(expected, abs=1e-15)

    def test_partition_is_full_model_based(self):
        # the wrongly-labeled point must land on the incorrect side regardless of masks
        net = Network((np.diag([10.0, 10.0]),), (np.zeros(2),), LINEAR)
        ds = LabeledDataset(np.array([[1.0, 0.0], [0.0, 1.0]]), np.array([0, 0]), 2)
        correct, incorrect = entropy_split_by_correctness(net, [Mask.ones(net.d)], ds)
        assert correct is not None and incorrect is not None


@given(st.floats(0.01, 0.99), st.integers(1, 60))
@settings(max_examples=40, deadline=None)
def test_masked_norm_theory_matches_per_coordinate_sum(p, dim):
    theta = SeededRng(dim).standard_normal(dim)
    _, theoretical = masked_norm_stats(theta, p, 1, SeededRng(0))
    assert theoretical == pytest.approx(p * float((theta**2).sum()), rel=1e-12)
