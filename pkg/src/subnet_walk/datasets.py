"""Labeled datasets: synthetic Gaussian blobs and IDX-format readers/writers."""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .exceptions import IdxFormatError
from .rng import SeededRng

TRAIN = "train"
TEST = "test"

IDX_IMAGE_MAGIC = 0x00000803
IDX_LABEL_MAGIC = 0x00000801


@dataclass(frozen=True)
class LabeledDataset:
    """Immutable array-backed classification dataset."""

    inputs: np.ndarray
    labels: np.ndarray
    num_classes: int
    split_tag: str = TRAIN

    def __post_init__(self):
        X = np.ascontiguousarray(self.inputs, dtype=np.float64)
        y = np.ascontiguousarray(self.labels, dtype=np.int64)
        if X.ndim != 2 or X.shape[0] < 1:
            raise ValueError("inputs must be a non-empty (n, dim) array")
        if y.shape != (X.shape[0],):
            raise ValueError(f"{X.shape[0]} inputs but {y.shape} labels")
        if not np.isfinite(X).all():
            raise ValueError("non-finite inputs")
        if self.num_classes < 1 or y.min() < 0 or y.max() >= self.num_classes:
            raise ValueError(f"labels must lie in [0, {self.num_classes})")
        if self.split_tag not in (TRAIN, TEST):
            raise ValueError(f"split_tag must be {TRAIN!r} or {TEST!r}")
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "inputs", X)
        object.__setattr__(self, "labels", y)

    @property
    def n(self) -> int:
        return self.inputs.shape[0]

    @property
    def dim(self) -> int:
        return self.inputs.shape[1]


def _alternating_split(X, y, num_classes):
    """Even positions (class-major order) go to train, odd to test."""
    idx = np.arange(X.shape[0])
    train = LabeledDataset(X[idx % 2 == 0], y[idx % 2 == 0], num_classes, TRAIN)
    test = LabeledDataset(X[idx % 2 == 1], y[idx % 2 == 1], num_classes, TEST)
    return train, test


def make_gaussian_blobs(
    n_per_class: int, num_classes: int, dim: int, separation: float, seed: int
) -> tuple[LabeledDataset, LabeledDataset]:
    """Isotropic unit-variance Gaussian classes, class c centered at separation * e_{c mod dim}.

    ``n_per_class`` counts points per class across both splits; the 50/50
    train/test split alternates over the class-major sample order, so the
    whole construction is a pure function of the seed.
    """
    if n_per_class < 1 or num_classes < 1:
        raise ValueError("counts must be >= 1")
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    if not separation > 0:
        raise ValueError(f"separation must be > 0, got {separation}")
    rng = SeededRng(seed)
    xs, ys = [], []
    for c in range(num_classes):
        center = np.zeros(dim)
        center[c % dim] = separation
        xs.append(rng.standard_normal((n_per_class, dim)) + center)
        ys.append(np.full(n_per_class, c, dtype=np.int64))
    return _alternating_split(np.concatenate(xs), np.concatenate(ys), num_classes)


def with_label_noise(ds: LabeledDataset, fraction: float, rng: SeededRng) -> LabeledDataset:
    """Reassign round(fraction * n) labels, chosen at random, to a random other class."""
    if not 0.0 <= fraction <= 1.0:
        raise ValueError(f"noise fraction must be in [0, 1], got {fraction}")
    if ds.num_classes < 2 or fraction == 0.0:
        return ds
    n_noisy = int(round(fraction * ds.n))
    if n_noisy == 0:
        return ds
    labels = ds.labels.copy()
    idx = rng.choice(ds.n, size=n_noisy, replace=False)
    shift = rng.integers(1, ds.num_classes, size=n_noisy)
    labels[idx] = (labels[idx] + shift) % ds.num_classes
    return LabeledDataset(ds.inputs, labels, ds.num_classes, ds.split_tag)


def _read_header(f, path, n_words):
    raw = f.read(4 * n_words)
    if len(raw) != 4 * n_words:
        raise IdxFormatError(f"{path}: truncated header")
    return struct.unpack(">" + "I" * n_words, raw)


def load_idx(
    images_path,
    labels_path,
    limit: int | None = None,
    num_classes: int | None = None,
    split_tag: str = TRAIN,
) -> LabeledDataset:
    """Read an IDX image/label file pair into a dataset.

    Headers are big-endian 32-bit words: images carry magic 0x00000803 with
    (count, rows, cols), labels 0x00000801 with (count,). Pixels are scaled
    to [0, 1] and flattened row-major to vectors of length rows*cols.
    """
    if limit is not None and limit < 1:
        raise ValueError(f"limit must be >= 1 when given, got {limit}")
    with open(images_path, "rb") as f:
        magic, count, rows, cols = _read_header(f, images_path, 4)
        if magic != IDX_IMAGE_MAGIC:
            raise IdxFormatError(
                f"{images_path}: expected image magic {IDX_IMAGE_MAGIC:#010x}, got {magic:#010x}"
            )
        payload = f.read(count * rows * cols)
        if len(payload) != count * rows * cols:
            raise IdxFormatError(f"{images_path}: expected {count * rows * cols} pixel bytes")
        pixels = np.frombuffer(payload, dtype=np.uint8)
    with open(labels_path, "rb") as f:
        magic, label_count = _read_header(f, labels_path, 2)
        if magic != IDX_LABEL_MAGIC:
            raise IdxFormatError(
                f"{labels_path}: expected label magic {IDX_LABEL_MAGIC:#010x}, got {magic:#010x}"
            )
        payload = f.read(label_count)
        if len(payload) != label_count:
            raise IdxFormatError(f"{labels_path}: expected {label_count} label bytes")
        labels = np.frombuffer(payload, dtype=np.uint8)
    if count != label_count:
        raise IdxFormatError(f"{count} images but {label_count} labels")
    if count == 0:
        raise IdxFormatError(f"{images_path}: empty dataset")
    X = pixels.reshape(count, rows * cols).astype(np.float64) / 255.0
    y = labels.astype(np.int64)
    if limit is not None:
        X, y = X[:limit], y[:limit]
    if num_classes is None:
        num_classes = int(y.max()) + 1
    return LabeledDataset(X, y, num_classes, split_tag)


def save_idx(ds: LabeledDataset, images_path, labels_path, rows: int | None = None, cols: int | None = None):
    """Write a dataset as an IDX pair (inverse of :func:`load_idx`).

    Pixel values must lie in [0, 1]; they are stored as round(v * 255), so a
    round trip is lossless exactly when every value is a multiple of 1/255.
    """
    if rows is None and cols is None:
        rows, cols = 1, ds.dim
    if rows * cols != ds.dim:
        raise ValueError(f"rows*cols = {rows * cols} != input dim {ds.dim}")
    if ds.inputs.min() < 0.0 or ds.inputs.max() > 1.0:
        raise ValueError("pixel values must lie in [0, 1] to serialize as IDX")
    if ds.num_classes > 256:
        raise ValueError("IDX labels are single bytes; num_classes must be <= 256")
    with open(images_path, "wb") as f:
        f.write(struct.pack(">IIII", IDX_IMAGE_MAGIC, ds.n, rows, cols))
        f.write(np.round(ds.inputs * 255.0).astype(np.uint8).tobytes())
    with open(labels_path, "wb") as f:
        f.write(struct.pack(">II", IDX_LABEL_MAGIC, ds.n))
        f.write(ds.labels.astype(np.uint8).tobytes())
