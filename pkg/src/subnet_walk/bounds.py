"""PAC-Bayes bound machinery and the counting side of mask space.

The bound treats the Bernoulli mask distribution as a posterior over
subnetworks and penalizes its KL divergence from a product-Bernoulli prior;
the counting helpers (binary entropy, log-binomials) quantify how many masks
of a given density exist.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .datasets import LabeledDataset
from .exceptions import TrainingDivergedError
from .masks import flip_neighbors, sample_mask
from .metrics import ContributionRecord, contribution_score
from .network import CROSS_ENTROPY, Network, init_mlp
from .rng import SeededRng
from .training import TrainConfig, train


@dataclass(frozen=True)
class PacBayesReport:
    """Mean subnetwork losses with the KL-penalized generalization bound.

    ``bound = train_loss_mean + sqrt((kl_nats + ln(1/delta)) / (2 n_train))``.
    The raw means use the losses as-is (cross-entropy may exceed 1, which the
    classical bound does not cover); the ``normalized_*`` fields rescale all
    losses into [0, 1] by ``loss_scale`` and restate the same bound there.
    """

    train_loss_mean: float
    test_loss_mean: float
    kl_nats: float
    delta: float
    n_train: int
    bound: float
    satisfied: bool
    loss_scale: float
    normalized_train_loss_mean: float
    normalized_test_loss_mean: float
    normalized_bound: float
    normalized_satisfied: bool


@dataclass(frozen=True)
class GrowthPoint:
    """One cell of a width/depth sweep: how many sampled subnetworks generalize."""

    width: int
    depth: int
    d: int
    n_sampled: int
    n_generalizing: int
    fraction: float
    diverged: bool = False

    def __post_init__(self):
        if not 0 <= self.n_generalizing <= self.n_sampled:
            raise ValueError("n_generalizing must lie in [0, n_sampled]")
        expected = self.n_generalizing / self.n_sampled if self.n_sampled else 0.0
        if self.fraction != expected:
            raise ValueError("fraction must equal n_generalizing / n_sampled")


def _xlogy(x: float, y: float) -> float:
    return 0.0 if x == 0.0 else x * math.log(y)


def kl_bernoulli_masks(q_p: float, prior_p: float, d: int) -> float:
    """KL divergence in nats between product Bernoullis Bern(q_p)^d and Bern(prior_p)^d.

    Equals d * [q ln(q/pi) + (1-q) ln((1-q)/(1-pi))]; exactly 0.0 when the
    rates coincide. A degenerate prior (0 or 1) that differs from q has
    infinite KL, which is rejected.
    """
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    for name, v in (("q_p", q_p), ("prior_p", prior_p)):
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"{name} must be in [0, 1], got {v}")
    if q_p == prior_p:
        return 0.0
    if prior_p in (0.0, 1.0):
        raise ValueError(f"prior rate {prior_p} puts zero mass where q does; KL is infinite")
    per_bit = (
        _xlogy(q_p, q_p) - _xlogy(q_p, prior_p)
        + _xlogy(1.0 - q_p, 1.0 - q_p) - _xlogy(1.0 - q_p, 1.0 - prior_p)
    )
    return d * per_bit


def pac_bayes_bound(
    records: list[ContributionRecord], kl_nats: float, n_train: int, delta: float
) -> PacBayesReport:
    """Average the record losses and evaluate the KL generalization bound."""
    if not records:
        raise ValueError("need at least one record")
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must be in (0, 1), got {delta}")
    if n_train < 1:
        raise ValueError(f"n_train must be >= 1, got {n_train}")
    if kl_nats < 0:
        raise ValueError(f"kl_nats must be >= 0, got {kl_nats}")
    train_mean = float(np.mean([r.train_loss for r in records]))
    test_mean = float(np.mean([r.test_loss for r in records]))
    slack = math.sqrt((kl_nats + math.log(1.0 / delta)) / (2.0 * n_train))
    bound = train_mean + slack
    scale = max(1.0, max(max(r.train_loss, r.test_loss) for r in records))
    norm_train = train_mean / scale
    norm_test = test_mean / scale
    norm_bound = norm_train + slack
    return PacBayesReport(
        train_loss_mean=train_mean,
        test_loss_mean=test_mean,
        kl_nats=float(kl_nats),
        delta=float(delta),
        n_train=int(n_train),
        bound=bound,
        satisfied=test_mean <= bound,
        loss_scale=scale,
        normalized_train_loss_mean=norm_train,
        normalized_test_loss_mean=norm_test,
        normalized_bound=norm_bound,
        normalized_satisfied=norm_test <= norm_bound,
    )


def epsilon_decay(records: list[ContributionRecord], eps_grid) -> list[tuple[float, float]]:
    """Fraction of records with score < eps, for each eps in an ascending grid."""
    grid = [float(e) for e in eps_grid]
    if not grid:
        raise ValueError("eps grid is empty")
    if any(b < a for a, b in zip(grid, grid[1:])):
        raise ValueError("eps grid must be sorted ascending")
    if not records:
        raise ValueError("need at least one record")
    scores = np.array([r.score for r in records])
    return [(eps, float(np.mean(scores < eps))) for eps in grid]


def neighbor_density_check(
    net: Network,
    records: list[ContributionRecord],
    train: LabeledDataset,
    test: LabeledDataset,
    eps: float,
    r: int,
    rng: SeededRng,
    kind: str = CROSS_ENTROPY,
) -> float:
    """Fraction of records with at least one sampled 1-flip neighbor scoring below eps.

    For each record, r distinct Hamming-1 neighbors are drawn and scored
    (stopping early at the first hit); this Monte Carlo check stands in for
    enumerating all d neighbors.
    """
    if r < 1:
        raise ValueError(f"r must be >= 1, got {r}")
    if not records:
        raise ValueError("need at least one record")
    hits = 0
    for rec in records:
        neighbors = flip_neighbors(rec.mask, 1, min(r, rec.mask.d), rng)
        for nb in neighbors:
            if contribution_score(net, nb, train, test, kind).score < eps:
                hits += 1
                break
    return hits / len(records)


def binary_entropy(p: float) -> float:
    """H(p) = -p log2 p - (1-p) log2 (1-p), in bits, with 0 log 0 := 0."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be in [0, 1], got {p}")
    if p in (0.0, 1.0):
        return 0.0
    return -(p * math.log2(p) + (1.0 - p) * math.log2(1.0 - p))


def log2_binomial(d: int, k: int) -> float:
    """log2 C(d, k) via log-gamma, exact to floating precision for any size."""
    if not 0 <= k <= d:
        raise ValueError(f"need 0 <= k <= d, got k={k}, d={d}")
    return (math.lgamma(d + 1) - math.lgamma(k + 1) - math.lgamma(d - k + 1)) / math.log(2)


def stirling_log2_binomial(d: int, k: int) -> float:
    """The entropy approximation d * H(k/d) that log2 C(d, k) approaches for large d."""
    if d < 1 or not 0 <= k <= d:
        raise ValueError(f"need d >= 1 and 0 <= k <= d, got k={k}, d={d}")
    return d * binary_entropy(k / d)


def width_depth_sweep(
    widths,
    depths,
    base_cfg: TrainConfig,
    train_data: LabeledDataset,
    test_data: LabeledDataset,
    eps: float,
    n_masks: int,
    rng: SeededRng,
    activation: str = "relu",
    loss_kind: str = CROSS_ENTROPY,
) -> list[GrowthPoint]:
    """Train one MLP per (width, depth) cell and count generalizing subnetworks.

    Each cell draws its own RNG substream keyed by (width, depth), so the
    sweep is deterministic and cells are order-independent. A diverging cell
    is recorded with ``diverged=True`` instead of aborting the sweep.
    """
    widths = sorted(int(w) for w in widths)
    depths = sorted(int(x) for x in depths)
    if not widths or not depths:
        raise ValueError("widths and depths must be non-empty")
    if n_masks < 1:
        raise ValueError(f"n_masks must be >= 1, got {n_masks}")
    points = []
    for width in widths:
        for depth in depths:
            cell_rng = rng.split(width).split(depth)
            sizes = [train_data.dim] + [width] * depth + [train_data.num_classes]
            net = init_mlp(sizes, activation, cell_rng.split(0))
            try:
                trained = train(net, train_data, base_cfg, cell_rng.split(1))
            except TrainingDivergedError:
                points.append(GrowthPoint(width, depth, net.d, 0, 0, 0.0, diverged=True))
                continue
            mask_rng = cell_rng.split(2)
            n_gen = 0
            for _ in range(n_masks):
                m = sample_mask(trained.d, base_cfg.retain_p, mask_rng)
                if contribution_score(trained, m, train_data, test_data, loss_kind).score < eps:
                    n_gen += 1
            points.append(
                GrowthPoint(width, depth, trained.d, n_masks, n_gen, n_gen / n_masks)
            )
    return points
