"""Lloyd's algorithm with seeded restarts, spread initialization, and empty-cluster repair."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import CentersModel, _uniform_weighted, as_matrix, nearest_centers
from .errors import ConfigError, DimensionError, InsufficientDataError

__all__ = ["FitOptions", "FitReport", "init_centers", "lloyd_fit", "predict"]

INIT_STRATEGIES = ("greedy-spread", "uniform-random")


@dataclass(frozen=True)
class FitOptions:
    """Knobs for a single k-means style fit."""

    k: int
    max_iters: int = 300
    rel_tol: float = 1e-6
    restarts: int = 10
    seed: int = 0
    init_strategy: str = "greedy-spread"

    def __post_init__(self):
        if self.k < 1:
            raise ConfigError("k must be >= 1")
        if self.max_iters < 1:
            raise ConfigError("max_iters must be >= 1")
        if not (self.rel_tol >= 0):
            raise ConfigError("rel_tol must be >= 0")
        if self.restarts < 1:
            raise ConfigError("restarts must be >= 1")
        if self.init_strategy not in INIT_STRATEGIES:
            raise ConfigError(f"unknown init strategy {self.init_strategy!r}")


@dataclass(eq=False)
class FitReport:
    """Outcome of one fit: final model, training assignment, and the risk trace."""

    model: CentersModel
    assignment: np.ndarray
    risk: float
    data_risk: float
    iterations: int
    converged: bool
    risk_trace: np.ndarray = field(repr=False, default=None)


def _rel_change(prev: float, curr: float) -> float:
    return abs(prev - curr) / max(prev, 1e-12)


def _spread_init(D: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """Farthest-point seeding: random first row, then maximin picks."""
    n = D.shape[0]
    first = int(rng.integers(n))
    chosen = [first]
    diff = D - D[first]
    min_sq = np.einsum("nd,nd->n", diff, diff)
    for _ in range(1, k):
        j = int(min_sq.argmax())  # ties -> lowest row index
        chosen.append(j)
        diff = D - D[j]
        min_sq = np.minimum(min_sq, np.einsum("nd,nd->n", diff, diff))
    return D[chosen].copy()


def _random_distinct_init(D: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    rows = []
    seen = set()
    for i in rng.permutation(D.shape[0]):
        key = D[i].tobytes()
        if key not in seen:
            seen.add(key)
            rows.append(i)
            if len(rows) == k:
                break
    return D[rows].copy()


def _check_enough_rows(D: np.ndarray, k: int) -> None:
    if D.shape[0] < k:
        raise InsufficientDataError(f"{D.shape[0]} rows < k={k}")
    if np.unique(D, axis=0).shape[0] < k:
        raise InsufficientDataError(f"fewer than k={k} distinct rows")


def _init(D: np.ndarray, opts: FitOptions, rng: np.random.Generator) -> np.ndarray:
    _check_enough_rows(D, opts.k)
    if opts.init_strategy == "greedy-spread":
        return _spread_init(D, opts.k, rng)
    return _random_distinct_init(D, opts.k, rng)


def init_centers(D, opts: FitOptions) -> CentersModel:
    """k distinct initial centers drawn from the data rows."""
    m = as_matrix(D)
    centers = _init(m, opts, np.random.default_rng(opts.seed))
    return CentersModel(centers, provenance=f"init:{opts.init_strategy}")


def _cluster_means(
    D: np.ndarray, labels: np.ndarray, k: int
) -> tuple[np.ndarray, np.ndarray]:
    sums = np.zeros((k, D.shape[1]))
    np.add.at(sums, labels, D)
    counts = np.bincount(labels, minlength=k)
    return sums, counts


def repair_empty(
    D: np.ndarray, labels: np.ndarray, centers: np.ndarray, counts: np.ndarray
) -> None:
    """Reseed each memberless center onto the point farthest from its assigned center.

    Mutates `centers` in place; assignments are not changed (the next pass
    picks the relocated centers up). Points already used to reseed one
    cluster are excluded from later picks.
    """
    empty = np.flatnonzero(counts == 0)
    if empty.size == 0:
        return
    diff = D - centers[labels]
    dist = np.einsum("nd,nd->n", diff, diff)
    for s in empty:
        j = int(dist.argmax())
        centers[s] = D[j]
        dist[j] = -1.0


def _lloyd_single(D: np.ndarray, centers: np.ndarray, opts: FitOptions):
    centers = centers.copy()
    k = opts.k
    prev_labels = None
    prev_risk = None
    trace = []
    converged = False
    it = 0
    for it in range(1, opts.max_iters + 1):
        labels, mins = nearest_centers(D, centers)
        risk = _uniform_weighted(mins)
        trace.append(risk)
        if prev_labels is not None and np.array_equal(labels, prev_labels):
            converged = True
            break
        if prev_risk is not None and _rel_change(prev_risk, risk) < opts.rel_tol:
            converged = True
            break
        if it == opts.max_iters:
            break
        sums, counts = _cluster_means(D, labels, k)
        nonempty = counts > 0
        centers[nonempty] = sums[nonempty] / counts[nonempty, None]
        repair_empty(D, labels, centers, counts)
        prev_labels, prev_risk = labels, risk
    return centers, labels, risk, it, converged, np.asarray(trace)


def lloyd_fit(D, opts: FitOptions, init=None) -> FitReport:
    """Alternating assignment/mean updates; best of `opts.restarts` seeded starts.

    Passing `init` (a CentersModel or a k x dim array) runs a single fit
    from exactly those centers, ignoring the restart and init settings.
    """
    m = as_matrix(D)
    if init is not None:
        c0 = init.centers if isinstance(init, CentersModel) else np.asarray(init, dtype=np.float64)
        c0 = np.atleast_2d(c0)
        if c0.shape != (opts.k, m.shape[1]):
            raise DimensionError(
                f"init centers shape {c0.shape} != ({opts.k}, {m.shape[1]})"
            )
        starts = [c0]
    else:
        if m.shape[0] < opts.k:
            raise InsufficientDataError(f"{m.shape[0]} rows < k={opts.k}")
        seeds = np.random.SeedSequence(opts.seed).spawn(opts.restarts)
        starts = [_init(m, opts, np.random.default_rng(s)) for s in seeds]

    best = None
    for centers0 in starts:
        result = _lloyd_single(m, centers0, opts)
        if best is None or result[2] < best[2]:
            best = result
    centers, labels, risk, iters, converged, trace = best
    model = CentersModel(centers, provenance="kmeans")
    return FitReport(
        model=model,
        assignment=labels,
        risk=risk,
        data_risk=risk,
        iterations=iters,
        converged=converged,
        risk_trace=trace,
    )


def predict(D, model: CentersModel) -> np.ndarray:
    """Nearest-center index for every row."""
    m = as_matrix(D)
    if m.shape[1] != model.dim:
        raise DimensionError(f"data has {m.shape[1]} columns, model dim {model.dim}")
    labels, _ = nearest_centers(m, model.centers)
    return labels
