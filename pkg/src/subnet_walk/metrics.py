"""Per-subnetwork and ensemble-level diagnostics.

The central quantity is the contribution score of a masked subnetwork:
mean test loss minus mean train loss, so low scores mean the subnetwork
generalizes. Ensemble metrics compare the full network against the mean
behavior of many masked copies, and entropy metrics quantify how much the
masked copies disagree on individual inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .datasets import LabeledDataset
from .masks import Mask
from .network import (
    CROSS_ENTROPY,
    LINEAR,
    Network,
    apply_mask,
    batch_loss,
    flatten_params,
    forward,
    softmax,
    with_params,
)
from .rng import SeededRng

ENUMERATION_LIMIT = 20  # 2^d forward passes; keep exact expectations desk-sized


@dataclass(frozen=True)
class ContributionRecord:
    """Train/test losses of one masked subnetwork; score = test - train exactly."""

    mask: Mask
    train_loss: float
    test_loss: float
    score: float

    def __post_init__(self):
        if not (np.isfinite(self.train_loss) and np.isfinite(self.test_loss)):
            raise ValueError("non-finite losses")
        if self.score != self.test_loss - self.train_loss:
            raise ValueError("score must equal test_loss - train_loss exactly")


@dataclass(frozen=True)
class EnsembleStats:
    """Full model vs ensemble-mean logits: MSE, softmax KL, argmax agreement."""

    mse_logits: float
    kl_softmax: float
    match_rate: float

    def __post_init__(self):
        if not 0.0 <= self.match_rate <= 1.0:
            raise ValueError(f"match_rate must be in [0, 1], got {self.match_rate}")
        if self.mse_logits < 0 or self.kl_softmax < -1e-12:
            raise ValueError("mse and kl must be non-negative")


def dataset_loss(net: Network, ds: LabeledDataset, kind: str = CROSS_ENTROPY, mask: Mask | None = None) -> float:
    """Mean loss of the (optionally masked) network over a full dataset pass."""
    return batch_loss(forward(net, ds.inputs, mask), ds.labels, kind)


def contribution_score(
    net: Network,
    m: Mask,
    train: LabeledDataset,
    test: LabeledDataset,
    kind: str = CROSS_ENTROPY,
) -> ContributionRecord:
    """Full-pass mean test loss minus mean train loss of the masked subnetwork."""
    masked = apply_mask(net, m)
    train_loss = dataset_loss(masked, train, kind)
    test_loss = dataset_loss(masked, test, kind)
    return ContributionRecord(m, train_loss, test_loss, test_loss - train_loss)


def ensemble_average_output(net: Network, masks, x) -> np.ndarray:
    """Mean of the masked forward passes, in logits space, in list order."""
    if len(masks) == 0:
        raise ValueError("need at least one mask")
    acc = forward(net, x, masks[0])
    for m in masks[1:]:
        acc = acc + forward(net, x, m)
    return acc / len(masks)


def scaled_output(net: Network, p: float, x) -> np.ndarray:
    """Forward pass with every parameter (weights and biases) multiplied by p."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"retain probability must be in [0, 1], got {p}")
    return forward(with_params(net, p * flatten_params(net)), x)


def ensemble_scaling_gap(net: Network, masks, p: float, xs) -> tuple[np.ndarray, float]:
    """Per-example absolute gap between the mask-ensemble mean and the p-scaled network.

    For affine networks the two agree in expectation, so the Monte Carlo gap
    shrinks like 1/sqrt(len(masks)). Each per-example value is the mean over
    output coordinates of the absolute difference; the second return value is
    the mean over examples. Rejects non-linear activations, where the
    identity does not hold.
    """
    if net.activation != LINEAR:
        raise ValueError("ensemble/scaling comparison requires a linear-activation network")
    X = np.atleast_2d(np.asarray(xs, dtype=np.float64))
    gaps = np.abs(ensemble_average_output(net, masks, X) - scaled_output(net, p, X)).mean(axis=1)
    return gaps, float(gaps.mean())


def expected_output_by_enumeration(net: Network, p: float, x) -> np.ndarray:
    """Exact mask-expectation of the output: sum over all 2^d masks weighted
    by p^popcount * (1-p)^(d-popcount). Only feasible for small d."""
    d = net.d
    if d > ENUMERATION_LIMIT:
        raise ValueError(f"exact enumeration needs d <= {ENUMERATION_LIMIT}, got {d}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"retain probability must be in [0, 1], got {p}")
    X = np.atleast_2d(np.asarray(x, dtype=np.float64))
    acc = np.zeros((X.shape[0], net.n_outputs))
    for bits in product((0, 1), repeat=d):
        k = sum(bits)
        weight = p**k * (1.0 - p) ** (d - k)
        if weight == 0.0:
            continue
        acc += weight * forward(net, X, Mask(np.array(bits)))
    return acc[0] if np.asarray(x).ndim == 1 else acc


def masked_norm_stats(theta, p: float, n_samples: int, rng: SeededRng) -> tuple[float, float]:
    """Empirical mean of ||theta * M||^2 over sampled masks, and its closed form p * ||theta||^2."""
    theta = np.asarray(theta, dtype=np.float64)
    if theta.ndim != 1:
        raise ValueError("theta must be a flat vector")
    if n_samples < 1:
        raise ValueError(f"n_samples must be >= 1, got {n_samples}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"retain probability must be in [0, 1], got {p}")
    sq = theta**2
    keep = rng.random((n_samples, theta.size)) < p
    empirical = float((keep @ sq).mean())
    return empirical, float(p * sq.sum())


def ensemble_stats(net: Network, masks, data: LabeledDataset) -> EnsembleStats:
    """Compare full-model logits against the ensemble-mean logits over a dataset."""
    if len(masks) == 0:
        raise ValueError("need at least one mask")
    full = forward(net, data.inputs)
    ens = ensemble_average_output(net, masks, data.inputs)
    mse = float(np.mean((full - ens) ** 2))
    p_full = softmax(full)
    logp_full = np.log(np.clip(p_full, 1e-300, None))
    logp_ens = np.log(np.clip(softmax(ens), 1e-300, None))
    kl = float(np.mean((p_full * (logp_full - logp_ens)).sum(axis=1)))
    match = float(np.mean(np.argmax(full, axis=1) == np.argmax(ens, axis=1)))
    return EnsembleStats(mse, kl, match)


def _shannon_entropy(probs: np.ndarray) -> np.ndarray:
    """Row-wise Shannon entropy in nats, with 0 log 0 := 0."""
    p = np.asarray(probs, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(p > 0.0, p * np.log(p), 0.0)
    return -terms.sum(axis=-1)


def ensemble_softmax(net: Network, masks, X) -> tuple[np.ndarray, np.ndarray]:
    """Mask-averaged softmax per input plus each input's mean per-mask entropy.

    Returns ``(mean_probs, per_mask_entropy_mean)`` with shapes (n, k), (n,).
    """
    if len(masks) == 0:
        raise ValueError("need at least one mask")
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    probs_acc = np.zeros((X.shape[0], net.n_outputs))
    ent_acc = np.zeros(X.shape[0])
    for m in masks:
        probs = softmax(forward(net, X, m))
        probs_acc += probs
        ent_acc += _shannon_entropy(probs)
    return probs_acc / len(masks), ent_acc / len(masks)


def predictive_entropy(net: Network, masks, x) -> tuple[float, float]:
    """Entropy (nats) of the mask-averaged softmax, and the mean per-mask entropy."""
    mean_probs, per_mask = ensemble_softmax(net, masks, np.atleast_2d(x))
    return float(_shannon_entropy(mean_probs)[0]), float(per_mask[0])


def output_variance(net: Network, masks, x) -> float:
    """Mean per-coordinate variance of the logits across masks.

    A spread proxy for the dispersion of the subnetwork output distribution;
    reported alongside softmax entropies, which are what the entropy
    experiments actually measure.
    """
    if len(masks) == 0:
        raise ValueError("need at least one mask")
    outs = np.stack([forward(net, x, m) for m in masks])
    return float(outs.var(axis=0).mean())


def entropy_split_by_correctness(
    net: Network, masks, data: LabeledDataset
) -> tuple[float | None, float | None]:
    """Mean predictive entropy over correctly vs incorrectly classified inputs.

    Correctness is judged by the full (unmasked) model's argmax against the
    dataset labels; the entropy is that of the mask-averaged softmax. An
    empty side is reported as None, never as zero.
    """
    mean_probs, _ = ensemble_softmax(net, masks, data.inputs)
    entropies = _shannon_entropy(mean_probs)
    predicted = np.argmax(forward(net, data.inputs), axis=1)
    correct = predicted == data.labels
    mean_correct = float(entropies[correct].mean()) if correct.any() else None
    mean_incorrect = float(entropies[~correct].mean()) if (~correct).any() else None
    return mean_correct, mean_incorrect
