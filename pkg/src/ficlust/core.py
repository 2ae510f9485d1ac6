"""Dense matrices, distance kernels, and the squared-norm clustering risk.

Every algorithm in the toolkit scores a set of centers by the mean squared
distance of each sample to its nearest center; the helpers here are the
single implementation of that computation.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import (
    ConfigError,
    DimensionError,
    EmptyInputError,
    NonFiniteValueError,
)

__all__ = [
    "CentersModel",
    "as_matrix",
    "as_vector",
    "as_labels",
    "squared_distance",
    "nearest_center",
    "nearest_centers",
    "empirical_risk",
    "max_row_norm",
]


def as_matrix(values, *, allow_empty: bool = False) -> np.ndarray:
    """Return `values` as a dense row-major float64 matrix.

    A 1-D input is treated as a column of scalar samples. Non-finite
    entries are rejected.
    """
    m = np.ascontiguousarray(values, dtype=np.float64)
    if m.ndim == 1:
        m = m.reshape(-1, 1)
    if m.ndim != 2:
        raise DimensionError(f"expected a 2-D matrix, got ndim={m.ndim}")
    if m.shape[1] < 1:
        raise DimensionError("matrix needs at least one column")
    if m.shape[0] < 1 and not allow_empty:
        raise EmptyInputError("matrix has no rows")
    if not np.isfinite(m).all():
        raise NonFiniteValueError("matrix contains NaN or infinite entries")
    return m


def as_vector(values) -> np.ndarray:
    """Return `values` as a finite 1-D float64 vector."""
    v = np.ascontiguousarray(values, dtype=np.float64).reshape(-1)
    if v.size == 0:
        raise EmptyInputError("vector is empty")
    if not np.isfinite(v).all():
        raise NonFiniteValueError("vector contains NaN or infinite entries")
    return v


def as_labels(values, *, n_rows: int | None = None, k: int | None = None) -> np.ndarray:
    """Return `values` as a 1-D int64 label vector, optionally range-checked."""
    a = np.asarray(values)
    if a.ndim != 1:
        raise DimensionError("labels must be a 1-D vector")
    if a.size == 0:
        raise EmptyInputError("label vector is empty")
    if not np.issubdtype(a.dtype, np.integer):
        f = np.asarray(values, dtype=np.float64)
        if not np.isfinite(f).all() or not np.equal(np.mod(f, 1), 0).all():
            raise NonFiniteValueError("labels must be integers")
        a = f.astype(np.int64)
    a = a.astype(np.int64)
    if a.min() < 0:
        raise ConfigError("labels must be nonnegative")
    if n_rows is not None and a.size != n_rows:
        raise DimensionError(f"expected {n_rows} labels, got {a.size}")
    if k is not None and a.max() >= k:
        raise ConfigError(f"label {a.max()} out of range for k={k}")
    return a


@dataclass(frozen=True, eq=False)
class CentersModel:
    """k cluster centers of a fixed dimension.

    `block_split` optionally records an (old, new) feature partition of the
    coordinate axes; `provenance` names the producing algorithm.
    """

    centers: np.ndarray
    block_split: tuple[int, int] | None = None
    provenance: str = "unspecified"

    def __post_init__(self):
        c = np.ascontiguousarray(self.centers, dtype=np.float64)
        if c.ndim == 1:
            c = c.reshape(-1, 1)
        if c.ndim != 2:
            raise DimensionError("centers must form a 2-D matrix")
        if c.shape[0] < 1:
            raise EmptyInputError("a model needs at least one center")
        if not np.isfinite(c).all():
            raise NonFiniteValueError("center coordinates must be finite")
        if self.block_split is not None:
            d1, d2 = (int(self.block_split[0]), int(self.block_split[1]))
            if d1 < 1 or d2 < 0 or d1 + d2 != c.shape[1]:
                raise ConfigError(
                    f"block split ({d1},{d2}) incompatible with dim {c.shape[1]}"
                )
            object.__setattr__(self, "block_split", (d1, d2))
        c.setflags(write=False)
        object.__setattr__(self, "centers", c)

    @property
    def k(self) -> int:
        return self.centers.shape[0]

    @property
    def dim(self) -> int:
        return self.centers.shape[1]

    def retag(self, provenance: str) -> "CentersModel":
        return replace(self, provenance=provenance)


def squared_distance(x, u) -> float:
    """Squared Euclidean distance between two vectors."""
    xv = as_vector(x)
    uv = as_vector(u)
    if xv.shape != uv.shape:
        raise DimensionError(f"length mismatch: {xv.size} vs {uv.size}")
    d = xv - uv
    return float(np.dot(d, d))


def _pairwise_sq(D: np.ndarray, centers: np.ndarray) -> np.ndarray:
    # difference-based form: slower than the norm expansion but free of
    # cancellation, which the golden-value tests rely on
    diff = D[:, None, :] - centers[None, :, :]
    return np.einsum("nkd,nkd->nk", diff, diff)


def nearest_centers(D: np.ndarray, centers: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-row nearest-center index and squared distance.

    Ties go to the lowest center index. Rows are processed in blocks so
    the n*k*d intermediate stays bounded.
    """
    n = D.shape[0]
    k = centers.shape[0]
    labels = np.empty(n, dtype=np.int64)
    mins = np.empty(n, dtype=np.float64)
    step = max(1, 2_000_000 // max(1, k * D.shape[1]))
    for lo in range(0, n, step):
        sq = _pairwise_sq(D[lo : lo + step], centers)
        idx = sq.argmin(axis=1)
        labels[lo : lo + step] = idx
        mins[lo : lo + step] = sq[np.arange(sq.shape[0]), idx]
    return labels, mins


def nearest_center(x, model: CentersModel) -> tuple[int, float]:
    """Index of the nearest center and the squared distance to it."""
    xv = as_vector(x)
    if xv.size != model.dim:
        raise DimensionError(f"point has dim {xv.size}, model has dim {model.dim}")
    diff = model.centers - xv
    sq = np.einsum("kd,kd->k", diff, diff)
    s = int(sq.argmin())
    return s, float(sq[s])


def _uniform_weighted(values: np.ndarray) -> float:
    # shared with the weighted-risk diagnostic so that uniform weights
    # reproduce the unweighted risk bit for bit
    n = values.size
    return float(np.dot(np.ones(n) / n, values))


def empirical_risk(D, model: CentersModel) -> float:
    """Mean squared distance of each row to its nearest center."""
    m = as_matrix(D)
    if m.shape[1] != model.dim:
        raise DimensionError(f"data has {m.shape[1]} columns, model dim {model.dim}")
    _, mins = nearest_centers(m, model.centers)
    return _uniform_weighted(mins)


def max_row_norm(D) -> float:
    """Largest Euclidean row norm; the data-radius diagnostic reported with fits."""
    m = as_matrix(D)
    return float(np.sqrt(np.einsum("nd,nd->n", m, m).max()))
