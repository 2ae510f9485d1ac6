"""Dataset ingestion, the two-stage/test split, normalization, and a synthetic generator.

CSV convention: UTF-8, header row, the d1 old-feature columns first, then
the d2 new-feature columns, plus an optional integer label column picked
out by header name.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import as_labels, as_matrix
from .errors import (
    ColumnMismatchError,
    ConfigError,
    DimensionError,
    InsufficientDataError,
    MissingFileError,
    NonFiniteValueError,
    ParseError,
)
from .incremental import StageBundle

__all__ = [
    "SplitSpec",
    "SynthSpec",
    "NormalizeParams",
    "load_dataset",
    "save_dataset",
    "split_stages",
    "normalize",
    "normalize_bundle",
    "generate_synthetic",
]

NORMALIZATION_MODES = ("none", "minmax", "zscore")


@dataclass(frozen=True)
class SplitSpec:
    """Two-stage/test split shape: fractions, availability ratio, shuffle seed."""

    prev_fraction: float = 0.5
    test_fraction: float = 0.2
    ra: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if not (0 < self.prev_fraction and 0 < self.test_fraction):
            raise ConfigError("fractions must be positive")
        if not self.prev_fraction + self.test_fraction < 1:
            raise ConfigError("prev_fraction + test_fraction must leave a current pool")
        if not (0 < self.ra <= 1):
            raise ConfigError("ra must lie in (0, 1]")


@dataclass(frozen=True)
class SynthSpec:
    """Gaussian-mixture generator settings for a feature-incremental benchmark."""

    k: int
    n: int
    d1: int
    d2: int
    separation: float
    new_feature_informativeness: float
    noise_sd: float
    seed: int = 0

    def __post_init__(self):
        if min(self.k, self.n, self.d1, self.d2) < 1:
            raise ConfigError("k, n, d1, d2 must all be >= 1")
        if not (0 <= self.new_feature_informativeness <= 1):
            raise ConfigError("new_feature_informativeness must lie in [0, 1]")
        if not self.noise_sd > 0:
            raise ConfigError("noise_sd must be > 0")


def load_dataset(path, d1: int, d2: int, label_column: str | None = None):
    """Parse a CSV into a feature matrix and optional integer labels.

    Columns must be the d1 old features, then the d2 new features, in
    declared order; `label_column` names the label column, if any.
    """
    p = Path(path)
    if not p.exists():
        raise MissingFileError(f"no such file: {p}")
    with open(p, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{p}: empty file") from None
        header = [h.strip() for h in header]
        label_idx = None
        if label_column is not None:
            if label_column not in header:
                raise ColumnMismatchError(f"{p}: no column named {label_column!r}")
            label_idx = header.index(label_column)
        n_features = len(header) - (0 if label_idx is None else 1)
        if n_features != d1 + d2:
            raise ColumnMismatchError(
                f"{p}: {n_features} feature columns, declared d1+d2={d1 + d2}"
            )
        rows, labels = [], []
        for lineno, rec in enumerate(reader, start=2):
            if len(rec) != len(header):
                raise ParseError(f"{p}:{lineno}: expected {len(header)} fields, got {len(rec)}")
            feats = []
            for j, cell in enumerate(rec):
                if j == label_idx:
                    try:
                        fv = float(cell)
                    except ValueError:
                        raise ParseError(f"{p}:{lineno}: bad label {cell!r}") from None
                    if not np.isfinite(fv) or fv != int(fv):
                        raise ParseError(f"{p}:{lineno}: non-integer label {cell!r}")
                    labels.append(int(fv))
                else:
                    try:
                        v = float(cell)
                    except ValueError:
                        raise ParseError(f"{p}:{lineno}: bad number {cell!r}") from None
                    if not np.isfinite(v):
                        raise NonFiniteValueError(f"{p}:{lineno}: non-finite value {cell!r}")
                    feats.append(v)
            rows.append(feats)
    if not rows:
        raise ParseError(f"{p}: no data rows")
    matrix = as_matrix(np.asarray(rows))
    return matrix, (as_labels(labels) if label_idx is not None else None)


def save_dataset(path, matrix, labels=None, label_column: str = "label") -> None:
    """Write a feature matrix (and optional labels) as a headered CSV."""
    m = as_matrix(matrix)
    header = [f"f{j}" for j in range(m.shape[1])]
    if labels is not None:
        labels = as_labels(labels, n_rows=m.shape[0])
        header.append(label_column)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for i in range(m.shape[0]):
            row = [repr(float(v)) for v in m[i]]
            if labels is not None:
                row.append(str(int(labels[i])))
            writer.writerow(row)


def split_stages(D, labels, d1: int, d2: int, spec: SplitSpec) -> StageBundle:
    """Seeded shuffle into previous (old features only) / test / current stages.

    Takes floor(prev_fraction*n) rows for the previous stage, then
    floor(test_fraction*n) for test; the current stage is the first
    floor(ra*pool) rows (at least one) of the remaining pool.
    """
    m = as_matrix(D)
    if m.shape[1] != d1 + d2:
        raise DimensionError(f"data has {m.shape[1]} columns, declared d1+d2={d1 + d2}")
    lab = None if labels is None else as_labels(labels, n_rows=m.shape[0])
    n = m.shape[0]
    n_prev = int(spec.prev_fraction * n)
    n_test = int(spec.test_fraction * n)
    n_pool = n - n_prev - n_test
    if min(n_prev, n_test, n_pool) < 1:
        raise InsufficientDataError(
            f"split of {n} rows leaves an empty partition ({n_prev}/{n_test}/{n_pool})"
        )
    n_curr = max(1, int(spec.ra * n_pool))
    perm = np.random.default_rng(spec.seed).permutation(n)
    prev_idx = perm[:n_prev]
    test_idx = perm[n_prev : n_prev + n_test]
    curr_idx = perm[n_prev + n_test : n_prev + n_test + n_curr]
    return StageBundle(
        d1=d1,
        d2=d2,
        prev_old=m[prev_idx, :d1],
        curr_full=m[curr_idx],
        test_full=m[test_idx],
        labels_prev=None if lab is None else lab[prev_idx],
        labels_curr=None if lab is None else lab[curr_idx],
        labels_test=None if lab is None else lab[test_idx],
    )


@dataclass(frozen=True, eq=False)
class NormalizeParams:
    """Column-wise affine transform x' = (x - offset) / scale."""

    mode: str
    offset: np.ndarray
    scale: np.ndarray


def normalize(D, mode: str, fitted_params: NormalizeParams | None = None):
    """Column-wise normalization; degenerate (constant) columns pass through.

    Params fitted on one matrix can be applied to another by passing them
    back in. Returns (matrix, params).
    """
    if mode not in NORMALIZATION_MODES:
        raise ConfigError(f"unknown normalization mode {mode!r}")
    m = as_matrix(D)
    if mode == "none":
        return m, NormalizeParams("none", np.zeros(m.shape[1]), np.ones(m.shape[1]))
    if fitted_params is None:
        if mode == "minmax":
            offset = m.min(axis=0)
            scale = m.max(axis=0) - offset
        else:
            offset = m.mean(axis=0)
            scale = m.std(axis=0)  # population sd
        degenerate = scale == 0
        offset = np.where(degenerate, 0.0, offset)
        scale = np.where(degenerate, 1.0, scale)
        fitted_params = NormalizeParams(mode, offset, scale)
    else:
        if fitted_params.mode != mode:
            raise ConfigError(
                f"params were fitted for mode {fitted_params.mode!r}, not {mode!r}"
            )
        if fitted_params.offset.size != m.shape[1]:
            raise DimensionError("params were fitted on a different column count")
    return (m - fitted_params.offset) / fitted_params.scale, fitted_params


def normalize_bundle(bundle: StageBundle, mode: str) -> StageBundle:
    """Normalize a bundle with params fitted on the training stages only.

    Old-feature params come from the previous rows stacked with the current
    old block; new-feature params from the current new block. The test
    matrix gets the same transforms.
    """
    if mode == "none":
        return bundle
    d1 = bundle.d1
    old_train = np.vstack([bundle.prev_old, bundle.curr_old_block()])
    _, p_old = normalize(old_train, mode)
    prev, _ = normalize(bundle.prev_old, mode, p_old) if bundle.n1 else (bundle.prev_old, p_old)
    curr_old, _ = normalize(bundle.curr_old_block(), mode, p_old)
    if bundle.d2 > 0:
        _, p_new = normalize(bundle.curr_new_block(), mode)
        curr_new, _ = normalize(bundle.curr_new_block(), mode, p_new)
    else:
        p_new = None
        curr_new = bundle.curr_new_block()
    test = bundle.test_full
    if test is not None:
        test_old, _ = normalize(test[:, :d1], mode, p_old)
        test_new = test[:, d1:]
        if p_new is not None:
            test_new, _ = normalize(test_new, mode, p_new)
        test = np.hstack([test_old, test_new])
    return StageBundle(
        d1=bundle.d1,
        d2=bundle.d2,
        prev_old=prev,
        curr_full=np.hstack([curr_old, curr_new]),
        test_full=test,
        labels_prev=bundle.labels_prev,
        labels_curr=bundle.labels_curr,
        labels_test=bundle.labels_test,
    )


def _axis_means(k: int, dim: int, scale: float) -> np.ndarray:
    # cluster s sits on coordinate axis (s mod dim), pushed further out on
    # every wrap; distinct, separation-scaled placements for any k
    means = np.zeros((k, dim))
    for s in range(k):
        means[s, s % dim] = scale * (1 + s // dim)
    return means


def generate_synthetic(spec: SynthSpec):
    """k Gaussian clusters whose new-feature block carries tunable signal.

    Old-feature means sit on separation-scaled axis placements. New-feature
    means interpolate between one shared placement (informativeness 0) and
    per-cluster distinct placements (informativeness 1). Rows come back
    shuffled, with true labels.
    """
    if spec.n < spec.k:
        raise InsufficientDataError(f"n={spec.n} < k={spec.k}")
    rng = np.random.default_rng(spec.seed)
    old_means = _axis_means(spec.k, spec.d1, spec.separation)
    distinct_new = _axis_means(spec.k, spec.d2, spec.separation)
    new_means = spec.new_feature_informativeness * distinct_new  # shared placement = origin
    means = np.hstack([old_means, new_means])
    counts = np.full(spec.k, spec.n // spec.k)
    counts[: spec.n % spec.k] += 1
    labels = np.repeat(np.arange(spec.k), counts)
    X = means[labels] + rng.normal(0.0, spec.noise_sd, size=(spec.n, spec.d1 + spec.d2))
    perm = rng.permutation(spec.n)
    return as_matrix(X[perm]), labels[perm].astype(np.int64)
