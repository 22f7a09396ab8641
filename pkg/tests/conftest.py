import numpy as np
import pytest

from subnet_walk import make_gaussian_blobs
from subnet_walk.network import LINEAR, RELU, init_mlp
from subnet_walk.rng import SeededRng
from subnet_walk.training import TrainConfig, train


@pytest.fixture(scope="session")
def blobs():
    """Well-separated 2-class blobs: 200 train / 200 test points."""
    return make_gaussian_blobs(n_per_class=200, num_classes=2, dim=2, separation=10.0, seed=7)


@pytest.fixture(scope="session")
def trained_relu(blobs):
    train_ds, _ = blobs
    net = init_mlp([2, 16, 2], RELU, SeededRng(3).split(0))
    cfg = TrainConfig(epochs=5, seed=3)
    return train(net, train_ds, cfg, SeededRng(3).split(1))


@pytest.fixture(scope="session")
def trained_linear(blobs):
    train_ds, _ = blobs
    net = init_mlp([2, 16, 2], LINEAR, SeededRng(4).split(0))
    cfg = TrainConfig(epochs=5, seed=4)
    return train(net, train_ds, cfg, SeededRng(4).split(1))


@pytest.fixture()
def small_net():
    """Untrained 2-4-2 net, 22 parameters; small enough for finite differences."""
    return init_mlp([2, 4, 2], RELU, SeededRng(11))


def random_inputs(n, dim, seed=0):
    return SeededRng(seed).standard_normal((n, dim))
