"""SGD with a fresh Bernoulli parameter mask drawn at every step.

Each mini-batch step samples one mask over all d parameters, runs the
forward/backward pass on the masked network, and updates only the retained
parameters: the gradient is multiplied elementwise by the mask, so dropped
parameters are untouched that step. No 1/p rescaling is applied during
training; evaluation-time weight scaling is a separate, explicit operation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .datasets import LabeledDataset
from .exceptions import TrainingDivergedError
from .masks import sample_mask
from .network import (
    CROSS_ENTROPY,
    LOSSES,
    RELU,
    SQUARED_ERROR,
    Network,
    one_hot,
    softmax,
)
from .rng import SeededRng

DIVERGENCE_THRESHOLD = 1e6

# Independent child streams inside train(); batch shuffling never shares draws
# with mask sampling, so retain_p=1 reproduces a mask-free trainer exactly.
_SHUFFLE_STREAM = 0
_MASK_STREAM = 1


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.1
    batch_size: int = 128
    epochs: int = 10
    retain_p: float = 0.8
    seed: int = 0
    loss: str = CROSS_ENTROPY

    def __post_init__(self):
        if not self.learning_rate > 0:
            raise ValueError(f"learning_rate must be > 0, got {self.learning_rate}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.epochs < 0:
            raise ValueError(f"epochs must be >= 0, got {self.epochs}")
        if not 0.0 < self.retain_p <= 1.0:
            raise ValueError(f"retain_p must be in (0, 1], got {self.retain_p}")
        if self.loss not in LOSSES:
            raise ValueError(f"loss must be one of {LOSSES}, got {self.loss!r}")


def batch_gradients(net: Network, X, labels, kind: str = CROSS_ENTROPY):
    """Mean batch loss and its analytic gradients w.r.t. the network's own parameters.

    Returns ``(loss, weight_grads, bias_grads)`` with one gradient array per
    layer, in layer order.
    """
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    y = np.asarray(labels, dtype=np.int64)
    n = X.shape[0]
    ws, bs = net.weights, net.biases
    relu = net.activation == RELU
    last = len(ws) - 1

    acts = [X]
    pre = []
    a = X
    for i, (w, b) in enumerate(zip(ws, bs)):
        z = a @ w.T + b
        pre.append(z)
        a = np.maximum(z, 0.0) if (relu and i < last) else z
        acts.append(a)

    Z = acts[-1]
    T = one_hot(y, Z.shape[1])
    if kind == CROSS_ENTROPY:
        P = softmax(Z)
        zmax = Z.max(axis=1)
        loss = float(np.mean(np.log(np.exp(Z - zmax[:, None]).sum(axis=1)) + zmax - Z[np.arange(n), y]))
        delta = (P - T) / n
    elif kind == SQUARED_ERROR:
        loss = float(np.mean((Z - T) ** 2))
        delta = 2.0 * (Z - T) / (n * Z.shape[1])
    else:
        raise ValueError(f"loss must be one of {LOSSES}, got {kind!r}")

    gws = [None] * len(ws)
    gbs = [None] * len(ws)
    for i in range(last, -1, -1):
        gws[i] = delta.T @ acts[i]
        gbs[i] = delta.sum(axis=0)
        if i > 0:
            delta = delta @ ws[i]
            if relu:
                delta = delta * (pre[i - 1] > 0.0)
    return loss, gws, gbs


def train(net: Network, data: LabeledDataset, cfg: TrainConfig, rng: SeededRng | None = None) -> Network:
    """Run epochs * ceil(n/batch) masked SGD steps and return the updated network.

    The same ``(net, data, cfg, rng)`` always produces bitwise-identical
    parameters and the identical mask sequence. Raises
    :class:`TrainingDivergedError` if a step loss goes non-finite or above
    ``DIVERGENCE_THRESHOLD``.
    """
    if data.n < 1:
        raise ValueError("dataset is empty")
    if data.dim != net.n_inputs:
        raise ValueError(f"dataset dim {data.dim} != network inputs {net.n_inputs}")
    if rng is None:
        rng = SeededRng(cfg.seed)
    shuffle_rng = rng.split(_SHUFFLE_STREAM)
    mask_rng = rng.split(_MASK_STREAM)

    ws = [w.copy() for w in net.weights]
    bs = [b.copy() for b in net.biases]
    d = net.d
    X, y = data.inputs, data.labels
    step = 0
    for _ in range(cfg.epochs):
        order = shuffle_rng.permutation(data.n)
        for start in range(0, data.n, cfg.batch_size):
            batch = order[start : start + cfg.batch_size]
            m = sample_mask(d, cfg.retain_p, mask_rng)
            mws, mbs = _split_mask_bits(m.bits, ws, bs)
            masked = Network(
                tuple(w * mw for w, mw in zip(ws, mws)),
                tuple(b * mb for b, mb in zip(bs, mbs)),
                net.activation,
            )
            loss, gws, gbs = batch_gradients(masked, X[batch], y[batch], cfg.loss)
            if not np.isfinite(loss) or loss > DIVERGENCE_THRESHOLD:
                raise TrainingDivergedError(step, loss)
            for i in range(len(ws)):
                ws[i] -= cfg.learning_rate * gws[i] * mws[i]
                bs[i] -= cfg.learning_rate * gbs[i] * mbs[i]
            step += 1
    return Network(tuple(ws), tuple(bs), net.activation)


def _split_mask_bits(bits: np.ndarray, ws, bs):
    """Slice flat mask bits into per-layer weight/bias shapes (frozen ordering)."""
    mws, mbs, pos = [], [], 0
    for w, b in zip(ws, bs):
        mws.append(bits[pos : pos + w.size].reshape(w.shape).astype(np.float64))
        pos += w.size
        mbs.append(bits[pos : pos + b.size].astype(np.float64))
        pos += b.size
    return mws, mbs
