import math

import numpy as np
import pytest

from subnet_walk.masks import Mask
from subnet_walk.network import (
    LINEAR,
    RELU,
    Network,
    apply_mask,
    batch_loss,
    flatten_params,
    forward,
    init_mlp,
    loss,
    with_params,
)
from subnet_walk.rng import SeededRng


def identity_net():
    return Network((np.eye(2),), (np.zeros(2),), LINEAR)


class TestNetworkInvariants:
    def test_dimension_mismatch_rejected(self):
        with pytest.raises(ValueError):
            Network((np.zeros((2, 2)), np.zeros((2, 3))), (np.zeros(2), np.zeros(2)), LINEAR)

    def test_non_finite_rejected(self):
        w = np.array([[1.0, np.inf], [0.0, 1.0]])
        with pytest.raises(ValueError):
            Network((w,), (np.zeros(2),), LINEAR)

    def test_d_counts_weights_and_biases(self):
        net = init_mlp([2, 32, 32, 2], RELU, SeededRng(0))
        assert net.d == 2 * 32 + 32 + 32 * 32 + 32 + 32 * 2 + 2

    def test_unknown_activation(self):
        with pytest.raises(ValueError):
            Network((np.eye(2),), (np.zeros(2),), "sigmoid")


class TestForward:
    def test_identity(self):
        out = forward(identity_net(), np.array([3.0, -1.0]))
        np.testing.assert_array_equal(out, [3.0, -1.0])

    def test_all_zero_mask_annihilates(self):
        net = init_mlp([3, 5, 4], RELU, SeededRng(1))
        out = forward(net, np.ones(3), Mask.zeros(net.d))
        np.testing.assert_array_equal(out, np.zeros(4))

    def test_matches_straight_line_matmul_oracle(self):
        net = init_mlp([3, 4, 2], LINEAR, SeededRng(0))
        X = SeededRng(2).standard_normal((7, 3))
        # independent oracle: explicit dense matmuls
        expected = (X @ net.weights[0].T + net.biases[0]) @ net.weights[1].T + net.biases[1]
        np.testing.assert_allclose(forward(net, X), expected, atol=1e-12)

    def test_shape_error(self):
        with pytest.raises(ValueError):
            forward(identity_net(), np.ones(3))

    def test_non_finite_input(self):
        with pytest.raises(ValueError):
            forward(identity_net(), np.array([1.0, np.nan]))

    def test_linear_mode_is_affine(self):
        # superposition: f(ax+by) == a f(x) + b f(y) - (a+b-1) f(0)
        net = init_mlp([3, 8, 8, 2], LINEAR, SeededRng(5))
        rng = SeededRng(6)
        x, y = rng.standard_normal(3), rng.standard_normal(3)
        a, b = 1.7, -0.4
        lhs = forward(net, a * x + b * y)
        rhs = a * forward(net, x) + b * forward(net, y) - (a + b - 1) * forward(net, np.zeros(3))
        np.testing.assert_allclose(lhs, rhs, atol=1e-10)

    def test_relu_mode_is_not_affine(self):
        # relu is positively homogeneous, so probe additivity with a sign flip
        net = init_mlp([3, 8, 2], RELU, SeededRng(5))
        x = SeededRng(6).standard_normal(3)
        lhs = forward(net, np.zeros(3))
        rhs = forward(net, x) + forward(net, -x) - forward(net, np.zeros(3))
        assert not np.allclose(lhs, rhs)


class TestLoss:
    def test_uniform_logits_cross_entropy(self):
        assert loss(np.zeros(10), 3) == pytest.approx(math.log(10), abs=1e-12)

    def test_one_hot_squared_error_zero(self):
        assert loss(np.array([0.0, 1.0, 0.0]), 1, "squared_error") == 0.0

    def test_cross_entropy_derived_value(self):
        # oracle: -ln(e^2 / (e^2 + 2)) evaluated directly
        expected = -math.log(math.exp(2.0) / (math.exp(2.0) + 2.0))
        assert loss(np.array([2.0, 0.0, 0.0]), 0) == pytest.approx(expected, abs=1e-12)
        assert expected == pytest.approx(0.2395447662218846, abs=1e-12)

    def test_target_out_of_range(self):
        with pytest.raises(ValueError):
            loss(np.zeros(3), 3)
        with pytest.raises(ValueError):
            loss(np.zeros(3), 5, "squared_error")

    def test_squared_error_vector_target(self):
        assert loss(np.array([1.0, 2.0]), np.array([0.0, 0.0]), "squared_error") == pytest.approx(2.5)

    def test_batch_loss_matches_single(self):
        Z = SeededRng(8).standard_normal((6, 4))
        y = np.array([0, 1, 2, 3, 1, 0])
        per_example = np.mean([loss(Z[i], y[i]) for i in range(6)])
        assert batch_loss(Z, y) == pytest.approx(per_example, rel=1e-12)

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            loss(np.zeros(2), 0, "hinge")


class TestMaskApplication:
    def test_all_ones_identity(self):
        net = init_mlp([2, 5, 2], RELU, SeededRng(0))
        masked = apply_mask(net, Mask.ones(net.d))
        for w, mw in zip(net.weights, masked.weights):
            np.testing.assert_array_equal(w, mw)

    def test_all_zeros(self):
        net = init_mlp([2, 5, 2], RELU, SeededRng(0))
        masked = apply_mask(net, Mask.zeros(net.d))
        assert all((w == 0).all() for w in masked.weights)
        assert all((b == 0).all() for b in masked.biases)

    def test_single_bit_zero_positional_oracle(self):
        # zeroing bit j must zero exactly the j-th flat parameter
        net = init_mlp([2, 3, 2], RELU, SeededRng(1))
        theta = flatten_params(net)
        for j in [0, 5, net.d - 1, 2 * 3, 2 * 3 + 3]:  # spans W0, b0, W1 boundaries
            m = Mask.ones(net.d).flip([j])
            expected = theta.copy()
            expected[j] = 0.0
            np.testing.assert_array_equal(flatten_params(apply_mask(net, m)), expected)

    def test_length_mismatch(self):
        net = init_mlp([2, 3, 2], RELU, SeededRng(1))
        with pytest.raises(ValueError):
            apply_mask(net, Mask.ones(net.d + 1))

    def test_ordering_bijection_across_architectures(self):
        # flatten/with_params round-trips and d agrees, for several shapes
        for sizes in ([2, 2], [3, 4, 2], [2, 32, 32, 2], [5, 1, 5]):
            net = init_mlp(sizes, LINEAR, SeededRng(2))
            theta = flatten_params(net)
            assert theta.shape == (net.d,)
            rebuilt = with_params(net, theta)
            np.testing.assert_array_equal(flatten_params(rebuilt), theta)
            x = SeededRng(3).standard_normal(sizes[0])
            np.testing.assert_array_equal(forward(rebuilt, x), forward(net, x))


class TestInit:
    def test_glorot_bounds_and_zero_bias(self):
        net = init_mlp([10, 20, 5], RELU, SeededRng(0))
        for w, b in zip(net.weights, net.biases):
            fan_out, fan_in = w.shape
            limit = math.sqrt(6.0 / (fan_in + fan_out))
            assert np.abs(w).max() <= limit
            assert (b == 0).all()

    def test_deterministic(self):
        a = init_mlp([4, 8, 3], RELU, SeededRng(42))
        b = init_mlp([4, 8, 3], RELU, SeededRng(42))
        for wa, wb in zip(a.weights, b.weights):
            np.testing.assert_array_equal(wa, wb)

    def test_bad_sizes(self):
        with pytest.raises(ValueError):
            init_mlp([4], RELU, SeededRng(0))
        with pytest.raises(ValueError):
            init_mlp([4, 0, 2], RELU, SeededRng(0))
