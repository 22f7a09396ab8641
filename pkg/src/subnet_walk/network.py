"""Dense feed-forward networks as pure functions of a flat parameter vector.

The parameter ordering is frozen: layer-major, each layer contributing its
weight matrix in row-major order followed by its bias vector. Masks, flat
gradient vectors, and serialized reports all rely on this bijection.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .masks import Mask
from .rng import SeededRng

LINEAR = "linear"
RELU = "relu"
ACTIVATIONS = (LINEAR, RELU)

CROSS_ENTROPY = "cross_entropy"
SQUARED_ERROR = "squared_error"
LOSSES = (CROSS_ENTROPY, SQUARED_ERROR)


@dataclass(frozen=True)
class Network:
    """A stack of affine layers sharing one activation choice.

    ``weights[i]`` has shape (out_i, in_i) and ``biases[i]`` shape (out_i,);
    consecutive layers must compose. The activation is applied after every
    layer except the last; with ``activation="linear"`` no nonlinearity is
    applied anywhere, so the whole map is affine in the input.
    """

    weights: tuple
    biases: tuple
    activation: str = RELU

    def __post_init__(self):
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"activation must be one of {ACTIVATIONS}, got {self.activation!r}")
        ws = tuple(np.ascontiguousarray(w, dtype=np.float64) for w in self.weights)
        bs = tuple(np.ascontiguousarray(b, dtype=np.float64) for b in self.biases)
        if len(ws) == 0 or len(ws) != len(bs):
            raise ValueError("need the same nonzero number of weight matrices and bias vectors")
        for i, (w, b) in enumerate(zip(ws, bs)):
            if w.ndim != 2 or b.ndim != 1 or w.shape[0] != b.shape[0]:
                raise ValueError(f"layer {i}: weight {w.shape} and bias {b.shape} do not match")
            if i > 0 and ws[i - 1].shape[0] != w.shape[1]:
                raise ValueError(
                    f"layer {i}: input width {w.shape[1]} != previous output {ws[i - 1].shape[0]}"
                )
            if not (np.isfinite(w).all() and np.isfinite(b).all()):
                raise ValueError(f"layer {i}: non-finite parameters")
            w.setflags(write=False)
            b.setflags(write=False)
        object.__setattr__(self, "weights", ws)
        object.__setattr__(self, "biases", bs)

    @property
    def n_layers(self) -> int:
        return len(self.weights)

    @property
    def n_inputs(self) -> int:
        return self.weights[0].shape[1]

    @property
    def n_outputs(self) -> int:
        return self.weights[-1].shape[0]

    @property
    def layer_sizes(self) -> tuple:
        return (self.n_inputs,) + tuple(w.shape[0] for w in self.weights)

    @property
    def d(self) -> int:
        """Total parameter count (weights plus biases)."""
        return sum(w.size + b.size for w, b in zip(self.weights, self.biases))


def init_mlp(layer_sizes, activation: str, rng: SeededRng) -> Network:
    """Glorot-uniform weights in +-sqrt(6/(fan_in+fan_out)), zero biases."""
    sizes = [int(s) for s in layer_sizes]
    if len(sizes) < 2 or any(s < 1 for s in sizes):
        raise ValueError(f"layer_sizes needs >= 2 positive entries, got {layer_sizes}")
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.random((fan_out, fan_in)) * 2.0 * limit - limit)
        biases.append(np.zeros(fan_out))
    return Network(tuple(weights), tuple(biases), activation)


def flatten_params(net: Network) -> np.ndarray:
    """Concatenate parameters in the frozen ordering (per layer: W row-major, then b)."""
    parts = []
    for w, b in zip(net.weights, net.biases):
        parts.append(w.ravel())
        parts.append(b)
    return np.concatenate(parts)


def split_flat(net: Network, vec: np.ndarray) -> tuple[list, list]:
    """Slice a flat d-vector back into per-layer (weights, biases) arrays."""
    vec = np.asarray(vec, dtype=np.float64)
    if vec.shape != (net.d,):
        raise ValueError(f"expected a flat vector of length {net.d}, got shape {vec.shape}")
    ws, bs, pos = [], [], 0
    for w, b in zip(net.weights, net.biases):
        ws.append(vec[pos : pos + w.size].reshape(w.shape))
        pos += w.size
        bs.append(vec[pos : pos + b.size])
        pos += b.size
    return ws, bs


def with_params(net: Network, vec: np.ndarray) -> Network:
    """A copy of ``net`` with its parameters replaced by the flat vector ``vec``."""
    ws, bs = split_flat(net, vec)
    return Network(tuple(ws), tuple(bs), net.activation)


def apply_mask(net: Network, m: Mask) -> Network:
    """Zero the parameters whose mask bit is 0; the input network is untouched."""
    if m.d != net.d:
        raise ValueError(f"mask length {m.d} != parameter count {net.d}")
    return with_params(net, flatten_params(net) * m.bits)


def _forward_arrays(weights, biases, activation, X):
    a = X
    last = len(weights) - 1
    for i, (w, b) in enumerate(zip(weights, biases)):
        z = a @ w.T + b
        a = np.maximum(z, 0.0) if (activation == RELU and i < last) else z
    return a


def forward(net: Network, x, mask: Mask | None = None) -> np.ndarray:
    """Logits of the (optionally masked) network.

    ``x`` may be a single input vector or a matrix with one example per row;
    the output shape matches.
    """
    if mask is not None:
        net = apply_mask(net, mask)
    X = np.asarray(x, dtype=np.float64)
    single = X.ndim == 1
    X = np.atleast_2d(X)
    if X.ndim != 2 or X.shape[1] != net.n_inputs:
        raise ValueError(f"input shape {np.shape(x)} does not match {net.n_inputs} input units")
    if not np.isfinite(X).all():
        raise ValueError("non-finite input")
    out = _forward_arrays(net.weights, net.biases, net.activation, X)
    return out[0] if single else out


def softmax(logits: np.ndarray) -> np.ndarray:
    z = np.asarray(logits, dtype=np.float64)
    z = z - z.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def log_softmax(logits: np.ndarray) -> np.ndarray:
    z = np.asarray(logits, dtype=np.float64)
    z = z - z.max(axis=-1, keepdims=True)
    return z - np.log(np.exp(z).sum(axis=-1, keepdims=True))


def one_hot(labels: np.ndarray, num_classes: int) -> np.ndarray:
    labels = np.asarray(labels, dtype=np.int64)
    out = np.zeros((labels.size, num_classes))
    out[np.arange(labels.size), labels] = 1.0
    return out


def loss(logits, target, kind: str = CROSS_ENTROPY) -> float:
    """Single-example loss.

    cross_entropy: -log softmax(logits)[target] for an integer class index.
    squared_error: mean squared difference against a target vector, or against
    the one-hot encoding of an integer class index.
    """
    z = np.asarray(logits, dtype=np.float64)
    if z.ndim != 1:
        raise ValueError("loss expects a single logits vector")
    if not np.isfinite(z).all():
        raise ValueError("non-finite logits")
    if kind == CROSS_ENTROPY:
        t = int(target)
        if not 0 <= t < z.size:
            raise ValueError(f"target index {t} out of range for {z.size} classes")
        return float(np.log(np.exp(z - z.max()).sum()) + z.max() - z[t])
    if kind == SQUARED_ERROR:
        t = np.asarray(target, dtype=np.float64)
        if t.ndim == 0:
            idx = int(t)
            if not 0 <= idx < z.size:
                raise ValueError(f"target index {idx} out of range for {z.size} classes")
            t = one_hot(np.array([idx]), z.size)[0]
        if t.shape != z.shape:
            raise ValueError(f"target shape {t.shape} != logits shape {z.shape}")
        return float(np.mean((z - t) ** 2))
    raise ValueError(f"loss kind must be one of {LOSSES}, got {kind!r}")


def batch_loss(logits: np.ndarray, labels: np.ndarray, kind: str = CROSS_ENTROPY) -> float:
    """Mean per-example loss over a batch of logits rows and integer labels."""
    Z = np.atleast_2d(np.asarray(logits, dtype=np.float64))
    y = np.asarray(labels, dtype=np.int64)
    if kind == CROSS_ENTROPY:
        logp = log_softmax(Z)
        return float(-logp[np.arange(y.size), y].mean())
    if kind == SQUARED_ERROR:
        return float(np.mean((Z - one_hot(y, Z.shape[1])) ** 2))
    raise ValueError(f"loss kind must be one of {LOSSES}, got {kind!r}")
