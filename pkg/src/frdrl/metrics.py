"""Classification and clustering quality metrics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError


@dataclass(frozen=True)
class MetricReport:
    """Per-fold metric values with their mean and population standard deviation."""

    name: str
    mean: float
    std: float
    per_fold: list[float]

    @classmethod
    def from_folds(cls, name: str, per_fold) -> "MetricReport":
        values = [float(v) for v in per_fold]
        return cls(name=name, mean=float(np.mean(values)), std=float(np.std(values)), per_fold=values)

    def csv_row(self) -> list[str]:
        return [self.name, repr(self.mean), repr(self.std)] + [repr(v) for v in self.per_fold]


def _check_labels(a, b):
    a = np.asarray(a, dtype=int)
    b = np.asarray(b, dtype=int)
    if a.size == 0 or b.size == 0:
        raise DataError("empty label vector")
    if a.shape != b.shape:
        raise DataError(f"label vectors differ in length: {a.shape} vs {b.shape}")
    return a, b


def accuracy(pred, truth) -> float:
    """Fraction of exact label matches."""
    pred, truth = _check_labels(pred, truth)
    return float(np.mean(pred == truth))


def macro_f1(pred, truth, c: int) -> float:
    """Unweighted mean of per-class F1 over all c classes.

    A class with no predicted and no true instances contributes F1 = 0.
    """
    pred, truth = _check_labels(pred, truth)
    f1s = []
    for cls in range(c):
        tp = int(np.sum((pred == cls) & (truth == cls)))
        fp = int(np.sum((pred == cls) & (truth != cls)))
        fn = int(np.sum((pred != cls) & (truth == cls)))
        denom = 2 * tp + fp + fn
        f1s.append(2.0 * tp / denom if denom > 0 else 0.0)
    return float(np.mean(f1s))


def _contingency(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    la, a_idx = np.unique(a, return_inverse=True)
    lb, b_idx = np.unique(b, return_inverse=True)
    table = np.zeros((la.size, lb.size), dtype=np.int64)
    np.add.at(table, (a_idx, b_idx), 1)
    return table


def nmi(a, b) -> float:
    """Mutual information normalized by sqrt(H(a) * H(b)).

    Returns 1.0 by convention when both partitions are a single cluster, and
    0.0 when exactly one of them is (mutual information is then 0).
    """
    a, b = _check_labels(a, b)
    table = _contingency(a, b)
    n = a.size
    pa = table.sum(axis=1) / n
    pb = table.sum(axis=0) / n
    ha = float(-np.sum(pa * np.log(pa, where=pa > 0, out=np.zeros_like(pa))))
    hb = float(-np.sum(pb * np.log(pb, where=pb > 0, out=np.zeros_like(pb))))
    if ha == 0.0 and hb == 0.0:
        return 1.0
    if ha == 0.0 or hb == 0.0:
        return 0.0
    mi = 0.0
    for i in range(table.shape[0]):
        for j in range(table.shape[1]):
            nij = table[i, j]
            if nij > 0:
                pij = nij / n
                mi += pij * np.log(pij / (pa[i] * pb[j]))
    value = mi / np.sqrt(ha * hb)
    return float(min(max(value, 0.0), 1.0))


def ari(a, b) -> float:
    """Pair-counting Rand index adjusted for chance.

    Returns 1.0 when the adjustment denominator vanishes (both partitions
    degenerate in the same way, e.g. both single-cluster).
    """
    a, b = _check_labels(a, b)
    table = _contingency(a, b)
    n = a.size

    def comb2(x):
        return x * (x - 1) / 2.0

    sum_ij = float(np.sum(comb2(table.astype(float))))
    sum_a = float(np.sum(comb2(table.sum(axis=1).astype(float))))
    sum_b = float(np.sum(comb2(table.sum(axis=0).astype(float))))
    total = comb2(float(n))
    if total == 0.0:
        return 1.0
    expected = sum_a * sum_b / total
    maximum = 0.5 * (sum_a + sum_b)
    if maximum == expected:
        return 1.0
    return float((sum_ij - expected) / (maximum - expected))
