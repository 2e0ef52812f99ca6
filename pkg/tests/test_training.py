import numpy as np
import pytest

from kanbench.data import Dataset
from kanbench.errors import ConfigError, DataError, ShapeError
from kanbench.network import NetworkConfig, init_network
from kanbench.numerics import rng_derive
from kanbench.training import (
    Adam,
    TrainConfig,
    bce_loss,
    cce_loss,
    evaluate_accuracy,
    train,
)


class TestBceLoss:
    def test_perfect_predictions(self):
        probs = np.array([1.0, 0.0, 1.0])
        labels = np.array([1.0, 0.0, 1.0])
        loss, _ = bce_loss(probs, labels)
        assert loss == pytest.approx(0.0, abs=1e-10)

    def test_coin_flip_is_ln2(self):
        loss, _ = bce_loss(np.full(8, 0.5), np.array([0, 1] * 4, dtype=float))
        assert loss == pytest.approx(np.log(2), abs=1e-12)

    def test_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(0)
        probs = rng.uniform(0.05, 0.95, 10)
        labels = rng.integers(0, 2, 10).astype(float)
        _, grad = bce_loss(probs, labels)
        h = 1e-7
        for i in range(10):
            up, down = probs.copy(), probs.copy()
            up[i] += h
            down[i] -= h
            fd = (bce_loss(up, labels)[0] - bce_loss(down, labels)[0]) / (2 * h)
            assert grad[i] == pytest.approx(fd, abs=1e-6)

    def test_length_mismatch(self):
        with pytest.raises(ShapeError):
            bce_loss(np.zeros(3), np.zeros(4))

    def test_saturated_probabilities_stay_finite(self):
        loss, grad = bce_loss(np.array([0.0, 1.0]), np.array([1.0, 0.0]))
        assert np.isfinite(loss) and np.isfinite(grad).all()


class TestCceLoss:
    def test_uniform_is_ln3(self):
        probs = np.full((5, 3), 1 / 3)
        loss, _ = cce_loss(probs, np.array([0, 1, 2, 0, 1]))
        assert loss == pytest.approx(np.log(3), abs=1e-12)

    def test_one_hot_correct(self):
        probs = np.eye(3)[[2, 0, 1]]
        loss, _ = cce_loss(probs, np.array([2, 0, 1]))
        assert loss == pytest.approx(0.0, abs=1e-10)

    def test_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(1)
        probs = rng.dirichlet(np.ones(4), size=6)
        labels = rng.integers(0, 4, 6)
        _, grad = cce_loss(probs, labels)
        h = 1e-7
        for i in range(6):
            for c in range(4):
                up, down = probs.copy(), probs.copy()
                up[i, c] += h
                down[i, c] -= h
                fd = (cce_loss(up, labels)[0] - cce_loss(down, labels)[0]) / (2 * h)
                assert grad[i, c] == pytest.approx(fd, abs=1e-6)

    def test_out_of_range_label(self):
        with pytest.raises(DataError):
            cce_loss(np.full((2, 3), 1 / 3), np.array([0, 3]))


class TestAdam:
    def test_first_step_is_signed_lr(self):
        # m_hat / sqrt(v_hat) = g / |g| after one step, so the update is
        # -lr * sign(g) up to the epsilon correction
        lr = 0.05
        opt = Adam(lr)
        params = np.zeros(6)
        grads = np.array([1.0, -1.0, 2.5, -0.3, 10.0, -7.0])
        updated = opt.step(params, grads)
        np.testing.assert_allclose(updated, -lr * np.sign(grads), atol=1e-9)

    def test_lr_zero_keeps_params(self):
        opt = Adam(0.0)
        params = np.array([1.0, -2.0])
        np.testing.assert_array_equal(opt.step(params, np.array([3.0, -4.0])), params)


def two_point_dataset():
    return Dataset(np.array([[-1.0, 0.0], [1.0, 0.0]]), np.array([0, 1]), 2)


def cluster_dataset(n=40, seed=0):
    rng = rng_derive(seed, 0)
    x0 = rng.standard_normal((n // 2, 2)) * 0.3 + [-1.5, 0.0]
    x1 = rng.standard_normal((n // 2, 2)) * 0.3 + [1.5, 0.0]
    return Dataset(np.vstack([x0, x1]), np.repeat([0, 1], n // 2), 2)


class TestTrain:
    def test_zero_epochs_rejected(self):
        net = init_network(NetworkConfig("mlp", 2, [2], 2), rng_derive(0, 0))
        with pytest.raises(ConfigError):
            train(net, two_point_dataset(), TrainConfig(epochs=0))

    def test_zero_learning_rate_keeps_parameters(self):
        net = init_network(NetworkConfig("mlp", 2, [2], 2), rng_derive(0, 0))
        before = net.flatten_params().copy()
        train(net, two_point_dataset(), TrainConfig(epochs=1, learning_rate=0.0))
        np.testing.assert_array_equal(net.flatten_params(), before)

    def test_loss_strictly_decreases_on_separable_points(self):
        net = init_network(NetworkConfig("mlp", 2, [2], 2), rng_derive(2, 1))
        _, history = train(net, two_point_dataset(), TrainConfig(epochs=20))
        losses = history.losses
        assert len(losses) == 20
        assert all(b < a for a, b in zip(losses, losses[1:]))

    def test_same_inputs_same_result(self):
        for _ in range(2):
            nets = []
            for _ in range(2):
                net = init_network(NetworkConfig("kan", 2, [2], 2), rng_derive(3, 3))
                net, _ = train(net, cluster_dataset(), TrainConfig(), rng_derive(3, 4))
                nets.append(net.flatten_params())
            np.testing.assert_array_equal(nets[0], nets[1])

    def test_full_batch_mode(self):
        net = init_network(NetworkConfig("mlp", 2, [2], 2), rng_derive(4, 0))
        _, history = train(net, cluster_dataset(), TrainConfig(epochs=5, batch_size=None))
        assert len(history.losses) == 5
        assert all(np.isfinite(history.losses))

    def test_gd_optimizer_runs(self):
        net = init_network(NetworkConfig("mlp", 2, [2], 2), rng_derive(5, 0))
        _, history = train(
            net, cluster_dataset(), TrainConfig(epochs=3, optimizer="gd", batch_size=None)
        )
        assert len(history.losses) == 3

    def test_training_actually_learns(self):
        data = cluster_dataset(n=60, seed=9)
        net = init_network(NetworkConfig("mlp", 2, [2], 2), rng_derive(6, 0))
        net, _ = train(net, data, TrainConfig(), rng_derive(6, 1))
        assert evaluate_accuracy(net, data) > 0.9


class TestEvaluateAccuracy:
    def test_all_correct(self):
        data = cluster_dataset(n=20, seed=7)
        net = init_network(NetworkConfig("mlp", 2, [2], 2), rng_derive(7, 0))
        net, _ = train(net, data, TrainConfig(epochs=40), rng_derive(7, 1))
        if evaluate_accuracy(net, data) == 1.0:  # trained to separate
            probs, _ = net.forward(data.features)
            pred = (probs > 0.5).astype(int)
            assert (pred == data.labels).all()

    def test_half_probability_counts_as_class_zero(self):
        from kanbench.network import build_network

        net = build_network(NetworkConfig("mlp", 2, [2], 2))  # all-zero params -> probs 0.5
        data = Dataset(np.zeros((4, 2)), np.array([0, 0, 1, 1]), 2)
        assert evaluate_accuracy(net, data) == 0.5  # the two class-0 rows

    def test_matches_hand_loop_oracle(self):
        rng = rng_derive(8, 0)
        data = Dataset(rng.standard_normal((30, 2)), rng.integers(0, 2, 30), 2)
        net = init_network(NetworkConfig("kan", 2, [2], 2), rng_derive(8, 1))
        probs, _ = net.forward(data.features)
        correct = 0
        for i in range(30):
            pred = 1 if probs[i] > 0.5 else 0
            correct += pred == data.labels[i]
        assert evaluate_accuracy(net, data) == pytest.approx(correct / 30)

    def test_argmax_tie_breaks_low(self):
        from kanbench.network import build_network

        net = build_network(NetworkConfig("mlp", 2, [2], 3))  # uniform softmax output
        data = Dataset(np.zeros((3, 2)), np.array([0, 1, 2]), 3)
        assert evaluate_accuracy(net, data) == pytest.approx(1 / 3)


class TestEndToEndGradient:
    @pytest.mark.parametrize("arch", ["mlp", "kan"])
    @pytest.mark.parametrize("n_classes", [2, 3])
    def test_loss_gradient_through_backward(self, arch, n_classes):
        from kanbench.training import loss_for_head

        config = NetworkConfig(arch, 3, [2, 2], n_classes)
        net = init_network(config, rng_derive(11, n_classes))
        rng = rng_derive(12, 0)
        X = rng.standard_normal((5, 3))
        y = rng.integers(0, n_classes, 5)
        loss_fn = loss_for_head(net)
        labels = y if net.config.head_kind == "softmax" else y.astype(float)

        probs, cache = net.forward(X)
        _, d_probs = loss_fn(probs, labels)
        analytic = net.backward(cache, d_probs).flat()

        h = 1e-5
        p0 = net.flatten_params()
        numeric = np.zeros_like(p0)
        for i in range(p0.size):
            for delta, sign in ((h, 1.0), (-h, -1.0)):
                p = p0.copy()
                p[i] += delta
                net.set_flat_params(p)
                pr, _ = net.forward(X)
                numeric[i] += sign * loss_fn(pr, labels)[0]
        numeric /= 2 * h
        scale = max(np.abs(analytic).max(), np.abs(numeric).max(), 1e-8)
        assert np.abs(analytic - numeric).max() / scale < 1e-4
