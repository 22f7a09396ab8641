"""Dropout-trained MLPs and combinatorial analysis of their subnetwork mask space.

A subnetwork is the network with a binary mask applied elementwise to all d
parameters; the mask set forms a d-dimensional hypercube graph under 1-bit
flips. This package trains small dropout-regularized networks, scores their
subnetworks by test-minus-train loss, and analyzes that score over the mask
graph: smoothness, clusters, effective resistance, KL-penalized
generalization bounds, entropy, and growth with network width.
"""

from .bounds import (
    GrowthPoint,
    PacBayesReport,
    binary_entropy,
    epsilon_decay,
    kl_bernoulli_masks,
    log2_binomial,
    neighbor_density_check,
    pac_bayes_bound,
    stirling_log2_binomial,
    width_depth_sweep,
)
from .datasets import LabeledDataset, load_idx, make_gaussian_blobs, save_idx, with_label_noise
from .estimator import DropoutMLPClassifier
from .exceptions import (
    ConfigError,
    GraphDisconnectedError,
    IdxFormatError,
    IllConditionedWarning,
    TrainingDivergedError,
)
from .graph import (
    ResistanceResult,
    SubnetGraph,
    UnionFind,
    build_graph,
    connected_components,
    dirichlet_energy,
    effective_resistance,
    generalizing_clusters,
    laplacian,
    laplacian_pseudoinverse,
    resistance_oracle,
    resistance_score_correlation,
)
from .harness import (
    ExperimentReport,
    SeedAggregate,
    aggregate_seeds,
    emit_report,
    parse_config_file,
    run_experiment,
)
from .masks import Mask, flip_neighbors, hamming, sample_mask
from .metrics import (
    ContributionRecord,
    EnsembleStats,
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
from .network import (
    Network,
    apply_mask,
    batch_loss,
    flatten_params,
    forward,
    init_mlp,
    loss,
    with_params,
)
from .rng import SeededRng
from .training import TrainConfig, batch_gradients, train

__version__ = "0.1.0"
