"""External clustering-quality metrics: matched accuracy, pairwise F-score, NMI."""

from __future__ import annotations

import numpy as np
from scipy.optimize import linear_sum_assignment

from .core import as_labels
from .errors import (
    DimensionError,
    EmptyInputError,
    InsufficientDataError,
    NonFiniteValueError,
)

__all__ = ["optimal_matching", "accuracy", "pairwise_fscore", "nmi", "contingency_table"]


def optimal_matching(cost) -> tuple[np.ndarray, float]:
    """Exact minimum-cost one-to-one row/column matching.

    Rectangular matrices are zero-padded to square; rows matched to a
    padding column come back as -1. Returns (mapping, total cost over the
    real entries).
    """
    c = np.asarray(cost, dtype=np.float64)
    if c.ndim != 2:
        raise DimensionError("cost must be a 2-D matrix")
    if c.size == 0:
        raise EmptyInputError("cost matrix is empty")
    if not np.isfinite(c).all():
        raise NonFiniteValueError("cost matrix must be finite")
    r, ncols = c.shape
    n = max(r, ncols)
    padded = np.zeros((n, n))
    padded[:r, :ncols] = c
    rows, cols = linear_sum_assignment(padded)
    mapping = np.full(r, -1, dtype=np.int64)
    total = 0.0
    for i, j in zip(rows, cols):
        if i < r and j < ncols:
            mapping[i] = j
            total += c[i, j]
    return mapping, total


def _paired_labels(pred, truth) -> tuple[np.ndarray, np.ndarray]:
    p = as_labels(pred)
    t = as_labels(truth)
    if p.size != t.size:
        raise DimensionError(f"length mismatch: {p.size} vs {t.size}")
    return p, t


def contingency_table(pred, truth) -> np.ndarray:
    """Counts of rows per (predicted cluster, true class) pair."""
    p, t = _paired_labels(pred, truth)
    _, pi = np.unique(p, return_inverse=True)
    _, ti = np.unique(t, return_inverse=True)
    table = np.zeros((pi.max() + 1, ti.max() + 1), dtype=np.int64)
    np.add.at(table, (pi, ti), 1)
    return table


def accuracy(pred, truth) -> float:
    """Fraction of rows agreeing under the best one-to-one cluster/class mapping."""
    table = contingency_table(pred, truth)
    mapping, _ = optimal_matching(-table.astype(np.float64))
    matched = sum(table[i, j] for i, j in enumerate(mapping) if j >= 0)
    return matched / table.sum()


def _comb2(x: np.ndarray) -> int:
    x = x.astype(np.int64)
    return int((x * (x - 1) // 2).sum())


def pairwise_fscore(pred, truth) -> float:
    """F-score over unordered row pairs, counting co-clustered pairs.

    A pair is a true positive when both partitions place its rows together.
    Returns 0 when there are no true-positive pairs.
    """
    p, t = _paired_labels(pred, truth)
    if p.size < 2:
        raise InsufficientDataError("pairwise F-score needs at least two rows")
    table = contingency_table(p, t)
    tp = _comb2(table.reshape(-1))
    pred_pairs = _comb2(table.sum(axis=1))
    true_pairs = _comb2(table.sum(axis=0))
    if tp == 0:
        return 0.0
    precision = tp / pred_pairs
    recall = tp / true_pairs
    return 2 * precision * recall / (precision + recall)


def _entropy(counts: np.ndarray, n: int) -> float:
    p = counts[counts > 0] / n
    return float(-(p * np.log(p)).sum())


def nmi(pred, truth) -> float:
    """Mutual information normalized by the geometric mean of the entropies.

    Both partitions trivial (single cluster) counts as perfect agreement;
    exactly one trivial partition scores 0.
    """
    table = contingency_table(pred, truth)
    n = int(table.sum())
    h_pred = _entropy(table.sum(axis=1), n)
    h_true = _entropy(table.sum(axis=0), n)
    if h_pred == 0.0 and h_true == 0.0:
        return 1.0
    if h_pred == 0.0 or h_true == 0.0:
        return 0.0
    pij = table / n
    outer = np.outer(table.sum(axis=1), table.sum(axis=0)) / (n * n)
    nz = pij > 0
    mi = float((pij[nz] * np.log(pij[nz] / outer[nz])).sum())
    return float(min(1.0, max(0.0, mi / np.sqrt(h_pred * h_true))))
