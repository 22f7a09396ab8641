"""scikit-learn estimator facade over the masked-SGD trainer."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .datasets import TRAIN, LabeledDataset
from .network import CROSS_ENTROPY, RELU, batch_loss, forward, init_mlp
from .rng import SeededRng
from .training import TrainConfig, train

_INIT_STREAM = 0
_TRAIN_STREAM = 1


class DropoutMLPClassifier(ClassifierMixin, BaseEstimator):
    """MLP classifier trained by SGD with per-step Bernoulli parameter dropout.

    Every mini-batch step draws a fresh binary mask over all weights and
    biases (each kept with probability ``retain_p``), evaluates and
    backpropagates through the masked network, and updates only the retained
    parameters. No 1/retain_p rescaling is applied at train or predict time.

    Parameters
    ----------
    hidden_layer_sizes : tuple of int
        Widths of the hidden layers.
    activation : {"relu", "linear"}
        "linear" removes all nonlinearities, making the model affine.
    learning_rate, batch_size, epochs : SGD hyperparameters.
    retain_p : float in (0, 1]
        Probability that each parameter survives a step's mask. 1.0 recovers
        plain SGD.
    loss : {"cross_entropy", "squared_error"}
    random_state : int
        Seeds initialization, batch shuffling, and mask sampling; fits are
        bitwise reproducible.

    Attributes
    ----------
    network_ : Network
        The trained network; the flat parameter vector it exposes is what
        mask-space analyses operate on.
    classes_ : ndarray of the class labels seen in fit.
    d_ : int, total parameter count.
    initial_loss_, final_loss_ : full-dataset unmasked training loss before
        and after fitting.
    """

    def __init__(
        self,
        hidden_layer_sizes=(32, 32),
        activation=RELU,
        learning_rate=0.1,
        batch_size=128,
        epochs=10,
        retain_p=0.8,
        loss=CROSS_ENTROPY,
        random_state=0,
    ):
        self.hidden_layer_sizes = hidden_layer_sizes
        self.activation = activation
        self.learning_rate = learning_rate
        self.batch_size = batch_size
        self.epochs = epochs
        self.retain_p = retain_p
        self.loss = loss
        self.random_state = random_state

    def fit(self, X, y):
        X, y = check_X_y(X, y, dtype=np.float64)
        self.classes_, y_idx = np.unique(y, return_inverse=True)
        if self.classes_.size < 2:
            raise ValueError("need at least 2 classes")
        self.n_features_in_ = X.shape[1]
        data = LabeledDataset(X, y_idx, self.classes_.size, TRAIN)
        cfg = TrainConfig(
            learning_rate=self.learning_rate,
            batch_size=self.batch_size,
            epochs=self.epochs,
            retain_p=self.retain_p,
            seed=self.random_state,
            loss=self.loss,
        )
        rng = SeededRng(self.random_state)
        sizes = [self.n_features_in_, *self.hidden_layer_sizes, self.classes_.size]
        net = init_mlp(sizes, self.activation, rng.split(_INIT_STREAM))
        self.initial_loss_ = batch_loss(forward(net, X), y_idx, self.loss)
        self.network_ = train(net, data, cfg, rng.split(_TRAIN_STREAM))
        self.final_loss_ = batch_loss(forward(self.network_, X), y_idx, self.loss)
        self.d_ = self.network_.d
        return self

    def decision_function(self, X):
        check_is_fitted(self, "network_")
        X = check_array(X, dtype=np.float64)
        return forward(self.network_, X)

    def predict_proba(self, X):
        z = self.decision_function(X)
        z = z - z.max(axis=1, keepdims=True)
        e = np.exp(z)
        return e / e.sum(axis=1, keepdims=True)

    def predict(self, X):
        logits = self.decision_function(X)
        return self.classes_[np.argmax(logits, axis=1)]
