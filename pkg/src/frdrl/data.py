"""Tabular dataset loading, normalization, encoding and deterministic splitting."""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError


@dataclass(frozen=True)
class Dataset:
    """A fully materialized tabular classification dataset.

    X holds one row per instance (N x d), y holds dense integer labels in
    [0, c), feature_names has one entry per column of X.
    """

    X: np.ndarray
    y: np.ndarray
    c: int
    feature_names: list[str]

    def __post_init__(self):
        X = np.ascontiguousarray(np.asarray(self.X, dtype=float))
        y = np.ascontiguousarray(np.asarray(self.y, dtype=int))
        if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
            raise DataError(f"feature matrix must be N x d with N,d >= 1, got shape {X.shape}")
        if y.shape != (X.shape[0],):
            raise DataError(f"label vector length {y.shape} does not match N={X.shape[0]}")
        if self.c < 2:
            raise DataError(f"need at least 2 classes, got c={self.c}")
        if y.min() < 0 or y.max() >= self.c:
            raise DataError(f"labels must lie in [0, {self.c}), got range [{y.min()}, {y.max()}]")
        if not np.all(np.isfinite(X)):
            raise DataError("feature matrix contains non-finite values")
        if len(self.feature_names) != X.shape[1]:
            raise DataError("feature_names length does not match feature count")
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def d(self) -> int:
        return self.X.shape[1]


@dataclass(frozen=True)
class FoldPlan:
    """Train/test index pairs for one cross-validation run."""

    folds: list[tuple[np.ndarray, np.ndarray]]
    seed: int = field(default=0)


def load_csv(path) -> Dataset:
    """Parse a UTF-8 comma-separated file into a Dataset.

    One header row; every column but the last must parse as a finite real;
    the last column is the label (string or integer). Labels are re-indexed
    densely 0..c-1 in order of first appearance.
    """
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            rows = list(reader)
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    if len(rows) < 2:
        raise DataError(f"{path}: need a header row and at least one data row")
    header = rows[0]
    if len(header) < 2:
        raise DataError(f"{path}: fewer than 1 feature column (last column is the label)")
    width = len(header)
    feature_names = [name.strip() for name in header[:-1]]

    features = []
    raw_labels = []
    for r, row in enumerate(rows[1:], start=2):
        if len(row) != width:
            raise DataError(f"{path}: ragged row {r} has {len(row)} cells, expected {width}")
        parsed = []
        for j, cell in enumerate(row[:-1]):
            try:
                value = float(cell)
            except ValueError:
                raise DataError(f"{path}: non-numeric feature cell at row {r}, column {j + 1}: {cell!r}") from None
            if not np.isfinite(value):
                raise DataError(f"{path}: non-finite feature cell at row {r}, column {j + 1}: {cell!r}")
            parsed.append(value)
        features.append(parsed)
        raw_labels.append(row[-1].strip())

    label_ids: dict[str, int] = {}
    for label in raw_labels:
        if label not in label_ids:
            label_ids[label] = len(label_ids)
    if len(label_ids) < 2:
        raise DataError(f"{path}: fewer than 2 distinct labels")
    y = np.array([label_ids[label] for label in raw_labels], dtype=int)
    return Dataset(X=np.array(features, dtype=float), y=y, c=len(label_ids), feature_names=feature_names)


def minmax_normalize(data: Dataset) -> Dataset:
    """Affinely map every feature column onto [0, 1]; constant columns map to 0."""
    X = data.X
    lo = X.min(axis=0)
    hi = X.max(axis=0)
    span = hi - lo
    constant = span == 0
    span = np.where(constant, 1.0, span)
    Xn = (X - lo) / span
    Xn[:, constant] = 0.0
    return Dataset(X=Xn, y=data.y, c=data.c, feature_names=list(data.feature_names))


def stratified_kfold(data: Dataset, k: int, seed: int) -> FoldPlan:
    """Deterministic stratified k-fold split.

    Per-class indices are shuffled, then dealt round-robin into folds with a
    pointer that carries across classes, so fold sizes stay balanced. Classes
    with fewer than k members trigger a fall back to a plain shuffled k-fold.
    """
    if k < 2:
        raise DataError(f"k must be >= 2, got {k}")
    if k > data.n:
        raise DataError(f"k={k} exceeds the number of instances N={data.n}")
    rng = np.random.default_rng(seed)
    class_counts = np.bincount(data.y, minlength=data.c)
    assignments = np.empty(data.n, dtype=int)
    if class_counts.min() < k:
        warnings.warn(
            f"class with {class_counts.min()} members < k={k}; falling back to plain shuffled k-fold",
            stacklevel=2,
        )
        order = rng.permutation(data.n)
        assignments[order] = np.arange(data.n) % k
    else:
        pointer = 0
        for cls in range(data.c):
            idx = np.flatnonzero(data.y == cls)
            idx = rng.permutation(idx)
            for i in idx:
                assignments[i] = pointer % k
                pointer += 1
    folds = []
    everything = np.arange(data.n)
    for f in range(k):
        test = everything[assignments == f]
        train = everything[assignments != f]
        folds.append((train, test))
    return FoldPlan(folds=folds, seed=seed)


def one_hot(y: np.ndarray, c: int) -> np.ndarray:
    """Encode integer labels as an N x c 0/1 matrix with one 1 per row."""
    y = np.asarray(y, dtype=int)
    if y.size and (y.min() < 0 or y.max() >= c):
        raise DataError(f"label out of range [0, {c})")
    Y = np.zeros((y.shape[0], c), dtype=float)
    Y[np.arange(y.shape[0]), y] = 1.0
    return Y
