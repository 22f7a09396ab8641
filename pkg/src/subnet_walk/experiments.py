"""The experiment catalogue: one runner per claim about dropout mask space.

Each runner trains desk-scale MLPs on synthetic Gaussian blobs (or an MNIST
subset when IDX paths are configured), repeats over seeds, and returns
per-seed metrics plus a pass/fail verdict against its acceptance predicate.
Experiment ids are the CLI vocabulary:

  lemma1      ensemble-mean output vs retain-scaled output (affine nets)
  lemma2      expected masked squared norm vs p * ||theta||^2
  theorem1    full model vs subnetwork-ensemble mean (MSE/KL/agreement)
  theorem2    abundance of generalizing subnetworks and 1-flip neighbor density
  theorem3    Dirichlet energy of contribution scores on a mask neighborhood
  corollary31 connected clusters of generalizing subnetworks
  lemma3      predictive entropy, correct vs incorrect inputs
  theorem4    KL-penalized generalization bound over sampled subnetworks
  theorem5    effective resistance vs contribution-score differences
  theorem6    generalizing fraction across width/depth grids
"""

from __future__ import annotations

import statistics
from dataclasses import asdict

import numpy as np

from .bounds import (
    epsilon_decay,
    kl_bernoulli_masks,
    neighbor_density_check,
    pac_bayes_bound,
    width_depth_sweep,
)
from .datasets import TEST, LabeledDataset, load_idx, make_gaussian_blobs, with_label_noise
from .exceptions import ConfigError
from .graph import (
    build_graph,
    connected_components,
    dirichlet_energy,
    generalizing_clusters,
    laplacian,
    laplacian_pseudoinverse,
    resistance_score_correlation,
)
from .harness import ExperimentOutcome, FieldSpec, map_seeds
from .masks import Mask, flip_neighbors, sample_mask
from .metrics import (
    contribution_score,
    ensemble_scaling_gap,
    ensemble_stats,
    entropy_split_by_correctness,
    expected_output_by_enumeration,
    masked_norm_stats,
    scaled_output,
)
from .network import LINEAR, init_mlp
from .rng import SeededRng
from .training import TrainConfig, train

# Per-seed RNG stream layout (children of SeededRng(seed)).
_S_INIT = 0
_S_TRAIN = 1
_S_MASKS = 2
_S_MASKS_WIDE = 3
_S_BASE_MASK = 4
_S_FLIPS = 5
_S_NEIGHBOR_CHECK = 6
_S_SWEEP = 7
_S_EXACT_NET = 10
_S_EXACT_INPUTS = 11
_S_DATA_NOISE = 99  # child of SeededRng(data_seed); noise is part of the data


# ---------------------------------------------------------------------------
# Shared config schema pieces
# ---------------------------------------------------------------------------

def _base_schema(**extra):
    schema = {
        "seeds": FieldSpec("int_list", [0, 1, 2, 3, 4], "training seeds to aggregate over"),
        "retain_p": FieldSpec("float", 0.8, "per-parameter keep probability"),
    }
    schema.update(extra)
    return schema


def _data_schema():
    return {
        "n_per_class": FieldSpec("int", 1000, "points per class across both splits"),
        "num_classes": FieldSpec("int", 2, "number of blob classes"),
        "dim": FieldSpec("int", 2, "input dimension of the blobs"),
        "separation": FieldSpec("float", 10.0, "distance of each class center from origin"),
        "data_seed": FieldSpec("int", 1234, "seed for the dataset (fixed across run seeds)"),
        "label_noise": FieldSpec("float", 0.0, "fraction of labels reassigned at random"),
        "mnist_images": FieldSpec("str", "", "IDX image file; switches data to an MNIST subset"),
        "mnist_labels": FieldSpec("str", "", "IDX label file"),
        "mnist_limit": FieldSpec("int", 4000, "number of MNIST rows to load before splitting"),
    }


def _model_schema(activation="relu", hidden=(32, 32), epochs=10):
    return {
        "hidden": FieldSpec("int_list", list(hidden), "hidden layer widths"),
        "activation": FieldSpec("str", activation, "relu or linear"),
        "learning_rate": FieldSpec("float", 0.1, "SGD learning rate"),
        "batch_size": FieldSpec("int", 128, "SGD batch size"),
        "epochs": FieldSpec("int", epochs, "SGD epochs"),
        "loss": FieldSpec("str", "cross_entropy", "training/evaluation loss"),
    }


def _make_data(cfg):
    """Blobs by default; a 50/50 split of an IDX file pair when paths are set."""
    if cfg.get("mnist_images") or cfg.get("mnist_labels"):
        if not (cfg.get("mnist_images") and cfg.get("mnist_labels")):
            raise ConfigError("mnist_images", "need both mnist_images and mnist_labels")
        full = load_idx(cfg["mnist_images"], cfg["mnist_labels"], limit=cfg["mnist_limit"],
                        num_classes=10)
        idx = np.arange(full.n)
        train_ds = LabeledDataset(full.inputs[idx % 2 == 0], full.labels[idx % 2 == 0], 10)
        test_ds = LabeledDataset(full.inputs[idx % 2 == 1], full.labels[idx % 2 == 1], 10, TEST)
    else:
        train_ds, test_ds = make_gaussian_blobs(
            cfg["n_per_class"], cfg["num_classes"], cfg["dim"], cfg["separation"], cfg["data_seed"]
        )
    noise = cfg.get("label_noise", 0.0)
    if noise:
        noise_rng = SeededRng(cfg["data_seed"], (_S_DATA_NOISE,))
        train_ds = with_label_noise(train_ds, noise, noise_rng.split(0))
        test_ds = with_label_noise(test_ds, noise, noise_rng.split(1))
    return train_ds, test_ds


def _train_model(cfg, train_ds, seed):
    rng = SeededRng(seed)
    sizes = [train_ds.dim, *cfg["hidden"], train_ds.num_classes]
    net = init_mlp(sizes, cfg["activation"], rng.split(_S_INIT))
    tc = TrainConfig(
        learning_rate=cfg["learning_rate"],
        batch_size=cfg["batch_size"],
        epochs=cfg["epochs"],
        retain_p=cfg["retain_p"],
        seed=seed,
        loss=cfg["loss"],
    )
    return train(net, train_ds, tc, rng.split(_S_TRAIN))


def _sample_masks(d, p, rng, count):
    return [sample_mask(d, p, rng) for _ in range(count)]


def _records_table(name, per_seed_records):
    """ContributionRecord CSVs, one per seed, fixed column order."""
    tables = []
    for seed, records in per_seed_records:
        rows = [(r.mask.to_string(), r.train_loss, r.test_loss, r.score) for r in records]
        tables.append((f"{name}_seed{seed}", ["mask", "train_loss", "test_loss", "score"], rows))
    return tables


# ---------------------------------------------------------------------------
# Experiments
# ---------------------------------------------------------------------------

def run_masked_norm_experiment(cfg):
    """Empirical E||theta * M||^2 against p * ||theta||^2 on random vectors."""

    def one_seed(seed):
        rng = SeededRng(seed)
        theta = rng.split(0).standard_normal(cfg["theta_dim"])
        empirical, theoretical = masked_norm_stats(theta, cfg["retain_p"], cfg["n_samples"], rng.split(1))
        rel_err = abs(empirical - theoretical) / theoretical
        return {
            "seed": seed,
            "empirical_mean": empirical,
            "theoretical": theoretical,
            "rel_err": rel_err,
        }

    per_seed = map_seeds(cfg["seeds"], one_seed)
    passed = all(row["rel_err"] < cfg["tolerance"] for row in per_seed)
    return ExperimentOutcome(
        per_seed,
        passed,
        "expected squared norm of a Bernoulli-masked vector equals p times the squared norm",
        csv_tables=[(
            "norms",
            ["seed", "empirical_mean", "theoretical", "rel_err"],
            [(r["seed"], r["empirical_mean"], r["theoretical"], r["rel_err"]) for r in per_seed],
        )],
    )


def run_ensemble_scaling_experiment(cfg):
    """Mask-ensemble mean vs p-scaled output: exact by enumeration, then Monte Carlo."""
    if cfg["activation"] != LINEAR:
        raise ConfigError("activation", "this comparison holds only for linear activations")
    train_ds, test_ds = _make_data(cfg)
    p = cfg["retain_p"]

    def one_seed(seed):
        rng = SeededRng(seed)
        # exact check on a tiny affine net, all 2^d masks with Bernoulli weights
        exact_net = init_mlp(cfg["exact_sizes"], LINEAR, rng.split(_S_EXACT_NET))
        xs_small = rng.split(_S_EXACT_INPUTS).standard_normal((4, cfg["exact_sizes"][0]))
        exact_gap = float(
            np.abs(
                expected_output_by_enumeration(exact_net, p, xs_small)
                - scaled_output(exact_net, p, xs_small)
            ).mean()
        )
        net = _train_model(cfg, train_ds, seed)
        xs = test_ds.inputs[: cfg["n_eval"]]
        masks = _sample_masks(net.d, p, rng.split(_S_MASKS), cfg["n_masks"])
        masks_wide = _sample_masks(net.d, p, rng.split(_S_MASKS_WIDE), 4 * cfg["n_masks"])
        _, gap = ensemble_scaling_gap(net, masks, p, xs)
        _, gap_wide = ensemble_scaling_gap(net, masks_wide, p, xs)
        return {"seed": seed, "exact_gap": exact_gap, "mc_gap": gap, "mc_gap_4x": gap_wide}

    per_seed = map_seeds(cfg["seeds"], one_seed)
    median_gap = statistics.median(r["mc_gap"] for r in per_seed)
    median_wide = statistics.median(r["mc_gap_4x"] for r in per_seed)
    passed = (
        all(r["exact_gap"] <= cfg["exact_tolerance"] for r in per_seed)
        and all(r["mc_gap"] < cfg["mc_limit"] for r in per_seed)
        and median_wide <= 0.5 * median_gap
    )
    return ExperimentOutcome(
        per_seed,
        passed,
        "mask-ensemble mean output of an affine network equals the retain-scaled network",
        csv_tables=[(
            "gaps",
            ["seed", "exact_gap", "mc_gap", "mc_gap_4x"],
            [(r["seed"], r["exact_gap"], r["mc_gap"], r["mc_gap_4x"]) for r in per_seed],
        )],
        json_artifacts=[("medians", {"mc_gap_median": median_gap, "mc_gap_4x_median": median_wide})],
    )


def run_ensemble_compression_experiment(cfg):
    """Full-model logits vs ensemble-mean logits: MSE, softmax KL, argmax agreement."""
    train_ds, test_ds = _make_data(cfg)

    def one_seed(seed):
        net = _train_model(cfg, train_ds, seed)
        masks = _sample_masks(net.d, cfg["retain_p"], SeededRng(seed).split(_S_MASKS), cfg["n_masks"])
        st = ensemble_stats(net, masks, test_ds)
        return {
            "seed": seed,
            "mse_logits": st.mse_logits,
            "kl_softmax": st.kl_softmax,
            "match_rate": st.match_rate,
        }

    per_seed = map_seeds(cfg["seeds"], one_seed)
    passed = all(
        r["match_rate"] >= cfg["match_min"] and r["kl_softmax"] < cfg["kl_max"] for r in per_seed
    )
    return ExperimentOutcome(
        per_seed,
        passed,
        "the full network tracks the mean prediction of its subnetwork ensemble",
        csv_tables=[(
            "ensemble",
            ["seed", "mse_logits", "kl_softmax", "match_rate"],
            [(r["seed"], r["mse_logits"], r["kl_softmax"], r["match_rate"]) for r in per_seed],
        )],
    )


def run_generalizing_density_experiment(cfg):
    """Score-threshold decay plus sampled 1-flip neighbor density."""
    train_ds, test_ds = _make_data(cfg)
    eps = cfg["eps"]

    def one_seed(seed):
        rng = SeededRng(seed)
        net = _train_model(cfg, train_ds, seed)
        full_gap = contribution_score(net, Mask.ones(net.d), train_ds, test_ds, cfg["loss"]).score
        masks = _sample_masks(net.d, cfg["retain_p"], rng.split(_S_MASKS), cfg["n_masks"])
        records = [contribution_score(net, m, train_ds, test_ds, cfg["loss"]) for m in masks]
        decay = epsilon_decay(records, cfg["eps_grid"])
        frac_at_eps = epsilon_decay(records, [eps])[0][1]
        neighbor_frac = neighbor_density_check(
            net, records, train_ds, test_ds, eps, cfg["neighbor_r"],
            rng.split(_S_NEIGHBOR_CHECK), cfg["loss"],
        )
        return {
            "seed": seed,
            "full_model_gap": full_gap,
            "frac_at_eps": frac_at_eps,
            "neighbor_frac": neighbor_frac,
            "_records": records,
            "_decay": decay,
        }

    raw = map_seeds(cfg["seeds"], one_seed)
    csv_tables = _records_table("records", [(r["seed"], r.pop("_records")) for r in raw])
    for row in raw:
        decay = row.pop("_decay")
        csv_tables.append((f"decay_seed{row['seed']}", ["eps", "fraction"], decay))
    passed = all(
        row["full_model_gap"] < eps / 2
        and row["frac_at_eps"] >= cfg["frac_min"]
        and row["neighbor_frac"] == 1.0
        for row in raw
    )
    return ExperimentOutcome(
        raw,
        passed,
        "generalizing subnetworks are abundant and have generalizing 1-flip neighbors",
        csv_tables=csv_tables,
    )


def _neighborhood_records(cfg, net, train_ds, test_ds, rng, n_flip1, n_flip2=0):
    """Score a base mask plus sampled 1-flip (and optionally 2-flip) neighbors."""
    base = sample_mask(net.d, cfg["retain_p"], rng.split(_S_BASE_MASK))
    flips = rng.split(_S_FLIPS)
    masks = [base] + flip_neighbors(base, 1, n_flip1, flips)
    if n_flip2:
        masks += flip_neighbors(base, 2, n_flip2, flips)
    return [contribution_score(net, m, train_ds, test_ds, cfg["loss"]) for m in masks]


def run_score_smoothness_experiment(cfg):
    """Dirichlet energy of contribution scores over a 1/2-flip mask neighborhood."""
    train_ds, test_ds = _make_data(cfg)

    def one_seed(seed):
        rng = SeededRng(seed)
        net = _train_model(cfg, train_ds, seed)
        records = _neighborhood_records(
            cfg, net, train_ds, test_ds, rng, cfg["n_flip1"], cfg["n_flip2"]
        )
        g = build_graph(records)
        raw, per_edge = dirichlet_energy(g)
        return {
            "seed": seed,
            "energy_raw": raw,
            "energy_per_edge": per_edge,
            "n_nodes": g.n_nodes,
            "n_edges": g.n_edges,
        }

    per_seed = map_seeds(cfg["seeds"], one_seed)
    passed = all(r["energy_per_edge"] < cfg["energy_tol"] for r in per_seed)
    artifacts = [
        (
            f"energy_seed{r['seed']}",
            {"raw": r["energy_raw"], "per_edge": r["energy_per_edge"],
             "n_nodes": r["n_nodes"], "n_edges": r["n_edges"]},
        )
        for r in per_seed
    ]
    return ExperimentOutcome(
        per_seed,
        passed,
        "contribution scores vary smoothly over the Hamming-1 mask graph",
        json_artifacts=artifacts,
    )


def run_cluster_experiment(cfg):
    """Connectivity of the generalizing subset of a base + 1-flip neighborhood."""
    train_ds, test_ds = _make_data(cfg)
    eps = cfg["eps"]

    def one_seed(seed):
        rng = SeededRng(seed)
        net = _train_model(cfg, train_ds, seed)
        records = _neighborhood_records(cfg, net, train_ds, test_ds, rng, cfg["n_neighbors"])
        g = build_graph(records)
        raw, per_edge = dirichlet_energy(g)
        clusters, largest_fraction = generalizing_clusters(g, eps)
        return {
            "seed": seed,
            "largest_fraction": largest_fraction,
            "n_clusters": len(clusters),
            "n_generalizing": int((g.scores < eps).sum()),
            "n_nodes": g.n_nodes,
            "energy_raw": raw,
            "energy_per_edge": per_edge,
            "n_edges": g.n_edges,
        }

    per_seed = map_seeds(cfg["seeds"], one_seed)
    passed = all(
        r["largest_fraction"] == 1.0
        and r["n_generalizing"] == r["n_nodes"]
        and r["energy_per_edge"] < cfg["energy_tol"]
        for r in per_seed
    )
    artifacts = [
        (
            f"energy_seed{r['seed']}",
            {"raw": r["energy_raw"], "per_edge": r["energy_per_edge"],
             "n_nodes": r["n_nodes"], "n_edges": r["n_edges"]},
        )
        for r in per_seed
    ]
    return ExperimentOutcome(
        per_seed,
        passed,
        "generalizing subnetworks form a single connected cluster under Hamming-1 edges",
        json_artifacts=artifacts,
    )


def run_predictive_entropy_experiment(cfg):
    """Ensemble predictive entropy on correctly vs incorrectly classified inputs."""
    train_ds, test_ds = _make_data(cfg)
    subset = LabeledDataset(
        test_ds.inputs[: cfg["n_eval"]], test_ds.labels[: cfg["n_eval"]],
        test_ds.num_classes, TEST,
    )

    def one_seed(seed):
        net = _train_model(cfg, train_ds, seed)
        masks = _sample_masks(net.d, cfg["retain_p"], SeededRng(seed).split(_S_MASKS), cfg["n_masks"])
        correct, incorrect = entropy_split_by_correctness(net, masks, subset)
        ordered = correct is not None and incorrect is not None and correct < incorrect
        return {
            "seed": seed,
            "entropy_correct": correct,
            "entropy_incorrect": incorrect,
            "ordered_ok": ordered,
        }

    per_seed = map_seeds(cfg["seeds"], one_seed)
    n_ok = sum(1 for r in per_seed if r["ordered_ok"])
    passed = n_ok >= max(1, len(cfg["seeds"]) - 1)
    return ExperimentOutcome(
        per_seed,
        passed,
        "ensemble predictive entropy is lower on correctly classified inputs",
        csv_tables=[(
            "entropy",
            ["seed", "entropy_correct", "entropy_incorrect", "ordered_ok"],
            [(r["seed"], r["entropy_correct"], r["entropy_incorrect"], r["ordered_ok"]) for r in per_seed],
        )],
    )


def run_generalization_bound_experiment(cfg):
    """KL-penalized bound over sampled subnetworks, under both prior choices."""
    train_ds, test_ds = _make_data(cfg)
    if cfg["prior"] not in ("retain", "uniform"):
        raise ConfigError("prior", "must be 'retain' or 'uniform'")
    p = cfg["retain_p"]

    def one_seed(seed):
        net = _train_model(cfg, train_ds, seed)
        masks = _sample_masks(net.d, p, SeededRng(seed).split(_S_MASKS), cfg["n_masks"])
        records = [contribution_score(net, m, train_ds, test_ds, cfg["loss"]) for m in masks]
        kl_retain = kl_bernoulli_masks(p, p, net.d)
        kl_uniform = kl_bernoulli_masks(p, 0.5, net.d)
        rep_retain = pac_bayes_bound(records, kl_retain, train_ds.n, cfg["delta"])
        rep_uniform = pac_bayes_bound(records, kl_uniform, train_ds.n, cfg["delta"])
        selected = rep_retain if cfg["prior"] == "retain" else rep_uniform
        return {
            "seed": seed,
            "train_loss_mean": selected.train_loss_mean,
            "test_loss_mean": selected.test_loss_mean,
            "kl_retain": kl_retain,
            "kl_uniform": kl_uniform,
            "bound_retain": rep_retain.bound,
            "bound_uniform": rep_uniform.bound,
            "satisfied_retain": rep_retain.satisfied,
            "satisfied_uniform": rep_uniform.satisfied,
            "d": net.d,
            "_selected": selected,
        }

    raw = map_seeds(cfg["seeds"], one_seed)
    artifacts = [
        (f"pac_bayes_seed{r['seed']}", asdict(r.pop("_selected"))) for r in raw
    ]
    per_bit = kl_bernoulli_masks(p, 0.5, 1)
    passed = all(
        r["kl_retain"] == 0.0
        and r["satisfied_retain"]
        and abs(r["kl_uniform"] - r["d"] * per_bit) <= 1e-9 * max(r["kl_uniform"], 1e-300)
        and r["bound_uniform"] > r["bound_retain"]
        for r in raw
    )
    return ExperimentOutcome(
        raw,
        passed,
        "subnetwork test loss satisfies the KL-penalized generalization bound",
        json_artifacts=artifacts,
    )


def run_resistance_experiment(cfg):
    """Effective resistance vs |score difference| over a base + 1-flip neighborhood."""
    train_ds, test_ds = _make_data(cfg)

    def one_seed(seed):
        rng = SeededRng(seed)
        net = _train_model(cfg, train_ds, seed)
        records = _neighborhood_records(cfg, net, train_ds, test_ds, rng, cfg["n_neighbors"])
        g = build_graph(records)
        Lp = laplacian_pseudoinverse(laplacian(g), connected_components(g))
        result = resistance_score_correlation(g, Lp, cfg["max_pairs"], rng.split(8))
        return {
            "seed": seed,
            "pearson_r": result.pearson_r,
            "n_pairs": len(result.pairs),
            "_pairs": result.pairs,
        }

    raw = map_seeds(cfg["seeds"], one_seed)
    csv_tables = [
        (f"resistance_seed{r['seed']}", ["node_i", "node_j", "rho", "score_gap"], r.pop("_pairs"))
        for r in raw
    ]
    passed = all(
        r["pearson_r"] is not None and cfg["r_min"] <= r["pearson_r"] <= cfg["r_max"]
        for r in raw
    )
    return ExperimentOutcome(
        raw,
        passed,
        "effective resistance between subnetworks relates weakly to score differences",
        csv_tables=csv_tables,
    )


def run_growth_experiment(cfg):
    """Generalizing-subnetwork fraction across a width x depth grid."""
    train_ds, test_ds = _make_data(cfg)
    widths = sorted(cfg["widths"])
    depths = sorted(cfg["depths"])

    def one_seed(seed):
        tc = TrainConfig(
            learning_rate=cfg["learning_rate"],
            batch_size=cfg["batch_size"],
            epochs=cfg["epochs"],
            retain_p=cfg["retain_p"],
            seed=seed,
            loss=cfg["loss"],
        )
        points = width_depth_sweep(
            widths, depths, tc, train_ds, test_ds, cfg["eps"], cfg["n_masks"],
            SeededRng(seed).split(_S_SWEEP), cfg["activation"], cfg["loss"],
        )
        by_depth = {dep: [] for dep in depths}
        for pt in points:
            by_depth[pt.depth].append(pt)
        monotone = all(
            all(b.fraction >= a.fraction for a, b in zip(pts, pts[1:]))
            for pts in by_depth.values()
        )
        at_max_width = min(pts[-1].fraction for pts in by_depth.values())
        return {
            "seed": seed,
            "monotone_ok": monotone,
            "min_fraction_at_max_width": at_max_width,
            "any_diverged": any(pt.diverged for pt in points),
            "_points": points,
        }

    raw = map_seeds(cfg["seeds"], one_seed)
    rows = []
    for r in raw:
        for pt in r.pop("_points"):
            rows.append((pt.width, pt.depth, pt.d, pt.n_sampled, pt.n_generalizing,
                         pt.fraction, r["seed"]))
    passed = all(
        r["monotone_ok"] and r["min_fraction_at_max_width"] == 1.0 and not r["any_diverged"]
        for r in raw
    )
    return ExperimentOutcome(
        raw,
        passed,
        "the fraction of generalizing subnetworks grows with width toward saturation",
        csv_tables=[(
            "sweep",
            ["width", "depth", "d", "n_sampled", "n_generalizing", "fraction", "seed"],
            rows,
        )],
    )


# ---------------------------------------------------------------------------
# Registry
# ---------------------------------------------------------------------------

SCHEMAS = {
    "lemma1": _base_schema(
        **{**_data_schema(),
           "separation": FieldSpec("float", 2.0, "moderate input scale keeps per-mask output variance small")},
        **_model_schema(activation="linear"),
        n_masks=FieldSpec("int", 1000, "Monte Carlo mask count (the wide draw uses 4x)"),
        n_eval=FieldSpec("int", 200, "test inputs evaluated"),
        exact_sizes=FieldSpec("int_list", [2, 2, 2], "layer sizes of the enumeration net (d <= 20)"),
        exact_tolerance=FieldSpec("float", 1e-10, "allowed exact-enumeration gap"),
        mc_limit=FieldSpec("float", 0.05, "allowed Monte Carlo gap at n_masks"),
    ),
    "lemma2": _base_schema(
        theta_dim=FieldSpec("int", 1000, "length of the random vector"),
        n_samples=FieldSpec("int", 10000, "masks sampled per seed"),
        tolerance=FieldSpec("float", 0.01, "allowed relative error"),
    ),
    "theorem1": _base_schema(
        **_data_schema(),
        **_model_schema(activation="linear"),
        n_masks=FieldSpec("int", 1000, "ensemble size"),
        match_min=FieldSpec("float", 0.99, "required argmax agreement"),
        kl_max=FieldSpec("float", 3.0, "allowed mean softmax KL"),
    ),
    "theorem2": _base_schema(
        **_data_schema(),
        **_model_schema(),
        eps=FieldSpec("float", 0.02, "generalization threshold on the score"),
        eps_grid=FieldSpec("float_list", [0.005, 0.01, 0.02, 0.05], "thresholds for the decay curve"),
        n_masks=FieldSpec("int", 1000, "subnetworks sampled"),
        neighbor_r=FieldSpec("int", 8, "1-flip neighbors sampled per subnetwork"),
        frac_min=FieldSpec("float", 0.95, "required generalizing fraction at eps"),
    ),
    "theorem3": _base_schema(
        **_data_schema(),
        **_model_schema(),
        eps=FieldSpec("float", 0.02, "generalization threshold on the score"),
        n_flip1=FieldSpec("int", 150, "1-flip neighbors of the base mask"),
        n_flip2=FieldSpec("int", 149, "2-flip neighbors of the base mask"),
        energy_tol=FieldSpec("float", 1e-3, "allowed per-edge Dirichlet energy"),
    ),
    "corollary31": _base_schema(
        **_data_schema(),
        **_model_schema(),
        eps=FieldSpec("float", 0.02, "generalization threshold on the score"),
        n_neighbors=FieldSpec("int", 100, "1-flip neighbors of the base mask"),
        energy_tol=FieldSpec("float", 1e-3, "allowed per-edge Dirichlet energy"),
    ),
    "lemma3": _base_schema(
        **{**_data_schema(),
           "separation": FieldSpec("float", 2.0, "small separation so some inputs are ambiguous"),
           "label_noise": FieldSpec("float", 0.1, "fraction of labels reassigned at random")},
        **_model_schema(),
        n_masks=FieldSpec("int", 100, "masks in the predictive ensemble"),
        n_eval=FieldSpec("int", 200, "test inputs evaluated"),
    ),
    "theorem4": _base_schema(
        **_data_schema(),
        **_model_schema(),
        n_masks=FieldSpec("int", 200, "subnetworks sampled"),
        delta=FieldSpec("float", 0.05, "bound failure probability"),
        prior=FieldSpec("str", "retain", "'retain' (Bernoulli(p)) or 'uniform' (Bernoulli(0.5))"),
    ),
    "theorem5": _base_schema(
        **_data_schema(),
        **_model_schema(),
        n_neighbors=FieldSpec("int", 100, "1-flip neighbors of the base mask"),
        max_pairs=FieldSpec("int", 10000, "cap on correlated node pairs"),
        r_min=FieldSpec("float", -0.2, "lower acceptance bound on Pearson r"),
        r_max=FieldSpec("float", 0.3, "upper acceptance bound on Pearson r"),
    ),
    "theorem6": _base_schema(
        **{**_data_schema(),
           "n_per_class": FieldSpec("int", 4000, "larger sample keeps narrow-width scores below eps")},
        **_model_schema(),
        eps=FieldSpec("float", 0.02, "generalization threshold on the score"),
        widths=FieldSpec("int_list", [4, 8, 16, 32, 64], "hidden widths to sweep"),
        depths=FieldSpec("int_list", [1, 2, 3], "hidden depths to sweep"),
        n_masks=FieldSpec("int", 200, "subnetworks sampled per cell"),
    ),
}

EXPERIMENTS = {
    "lemma1": run_ensemble_scaling_experiment,
    "lemma2": run_masked_norm_experiment,
    "theorem1": run_ensemble_compression_experiment,
    "theorem2": run_generalizing_density_experiment,
    "theorem3": run_score_smoothness_experiment,
    "corollary31": run_cluster_experiment,
    "lemma3": run_predictive_entropy_experiment,
    "theorem4": run_generalization_bound_experiment,
    "theorem5": run_resistance_experiment,
    "theorem6": run_growth_experiment,
}

EXPERIMENT_IDS = tuple(sorted(EXPERIMENTS))
