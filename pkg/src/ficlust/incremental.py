"""Clustering algorithms for two-stage data whose feature space grows between stages.

Stage one carries only the old features; stage two carries old and new
features. Four strategies are implemented:

* feature tailoring (`fit_ft`): drop the new features, cluster the pooled
  old-feature rows of both stages;
* data reconstruction (`fit_dr`): impute the missing new-feature block of
  the first stage by block-constrained clustering, then cluster the pooled
  full-dimensional data;
* data adaptation (`fit_da`): cluster the second stage alone;
* model reuse (`fit_mr`): cluster the second stage under a quadratic
  penalty pulling the old-feature block of each center toward a pretrained
  center, solved by alternating assignment and closed-form block updates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    CentersModel,
    _uniform_weighted,
    as_labels,
    as_matrix,
    nearest_centers,
)
from .errors import (
    ConfigError,
    DegenerateClusterError,
    DimensionError,
    InsufficientDataError,
)
from .kmeans import (
    FitOptions,
    FitReport,
    _cluster_means,
    _init,
    _rel_change,
    lloyd_fit,
    repair_empty,
)

__all__ = [
    "StageBundle",
    "MrOptions",
    "ReconstructionDetails",
    "fit_ft",
    "fit_da",
    "fit_dr",
    "fit_mr",
    "reconstruct_missing",
    "update_old_block",
    "update_new_block",
]


@dataclass(frozen=True, eq=False)
class StageBundle:
    """Two-stage data layout plus the (old, new) feature partition.

    `prev_old` holds the first stage (old features only); `curr_full` holds
    the second stage over all features; `test_full`, when present, is the
    held-out evaluation matrix. Label vectors are evaluation-only.
    """

    d1: int
    d2: int
    prev_old: np.ndarray
    curr_full: np.ndarray
    test_full: np.ndarray | None = None
    labels_prev: np.ndarray | None = None
    labels_curr: np.ndarray | None = None
    labels_test: np.ndarray | None = None

    def __post_init__(self):
        d1, d2 = int(self.d1), int(self.d2)
        if d1 < 1 or d2 < 0:
            raise ConfigError(f"invalid feature partition ({d1},{d2})")
        object.__setattr__(self, "d1", d1)
        object.__setattr__(self, "d2", d2)
        prev = as_matrix(self.prev_old, allow_empty=True)
        curr = as_matrix(self.curr_full, allow_empty=True)
        if prev.shape[1] != d1:
            raise DimensionError(f"prev_old has {prev.shape[1]} columns, expected d1={d1}")
        if curr.shape[1] != d1 + d2:
            raise DimensionError(
                f"curr_full has {curr.shape[1]} columns, expected d1+d2={d1 + d2}"
            )
        object.__setattr__(self, "prev_old", prev)
        object.__setattr__(self, "curr_full", curr)
        if self.test_full is not None:
            test = as_matrix(self.test_full)
            if test.shape[1] != d1 + d2:
                raise DimensionError(
                    f"test_full has {test.shape[1]} columns, expected {d1 + d2}"
                )
            object.__setattr__(self, "test_full", test)
        for name, mat in (
            ("labels_prev", prev),
            ("labels_curr", curr),
            ("labels_test", self.test_full),
        ):
            lab = getattr(self, name)
            if lab is None:
                continue
            if mat is None:
                raise ConfigError(f"{name} given without its matrix")
            object.__setattr__(self, name, as_labels(lab, n_rows=mat.shape[0]))

    @property
    def n1(self) -> int:
        return self.prev_old.shape[0]

    @property
    def n2(self) -> int:
        return self.curr_full.shape[0]

    def curr_old_block(self) -> np.ndarray:
        return self.curr_full[:, : self.d1]

    def curr_new_block(self) -> np.ndarray:
        return self.curr_full[:, self.d1 :]


@dataclass(frozen=True)
class MrOptions:
    """Model-reuse settings: prior strength `theta` plus the base fit options."""

    theta: float
    base: FitOptions

    def __post_init__(self):
        if not np.isfinite(self.theta) or self.theta < 0:
            raise ConfigError("theta must be finite and >= 0")


@dataclass(eq=False)
class ReconstructionDetails:
    """Internals of one reconstruction: objective trace and the inner model."""

    objective_trace: np.ndarray
    iterations: int
    converged: bool
    centers: np.ndarray
    assignment: np.ndarray


def fit_ft(bundle: StageBundle, opts: FitOptions, init=None) -> FitReport:
    """Cluster the pooled old-feature rows of both stages."""
    stacked = np.vstack([bundle.prev_old, bundle.curr_old_block()])
    if stacked.shape[0] < opts.k:
        raise InsufficientDataError(
            f"{stacked.shape[0]} pooled rows < k={opts.k}"
        )
    report = lloyd_fit(stacked, opts, init=init)
    report.model = report.model.retag("FIC-FT")
    return report


def fit_da(bundle: StageBundle, opts: FitOptions, init=None) -> FitReport:
    """Cluster the second stage alone over all features."""
    if bundle.n2 < opts.k:
        raise InsufficientDataError(f"{bundle.n2} current rows < k={opts.k}")
    report = lloyd_fit(bundle.curr_full, opts, init=init)
    report.model = CentersModel(
        report.model.centers, block_split=(bundle.d1, bundle.d2), provenance="FIC-DA"
    )
    return report


def _reconstruct_single(
    bundle: StageBundle, opts: FitOptions, rng: np.random.Generator
):
    n1, d1 = bundle.n1, bundle.d1
    new_block = bundle.curr_new_block()
    full = np.vstack(
        [
            np.hstack([bundle.prev_old, np.tile(new_block.mean(axis=0), (n1, 1))]),
            bundle.curr_full,
        ]
    )
    centers = _init(full, opts, rng)
    n = full.shape[0]
    trace = [_uniform_weighted(nearest_centers(full, centers)[1])]
    converged = False
    it = 0
    labels = np.zeros(n, dtype=np.int64)
    for it in range(1, opts.max_iters + 1):
        labels, _ = nearest_centers(full, centers)
        sums, counts = _cluster_means(full, labels, opts.k)
        nonempty = counts > 0
        centers[nonempty] = sums[nonempty] / counts[nonempty, None]
        repair_empty(full, labels, centers, counts)
        # pull each first-stage row's unobserved block onto its center
        full[:n1, d1:] = centers[labels[:n1], d1:]
        obj = _uniform_weighted(nearest_centers(full, centers)[1])
        trace.append(obj)
        if _rel_change(trace[-2], obj) < opts.rel_tol:
            converged = True
            break
    return full, centers, labels, it, converged, np.asarray(trace)


def reconstruct_missing(bundle: StageBundle, opts: FitOptions, return_details: bool = False):
    """Complete the first stage's missing new-feature block.

    Alternates {assign all completed rows, update centers, copy each
    first-stage row's new block from its center} until the clustering risk
    of the completed data stalls. The observed old-feature block is never
    touched. Returns the completed n1 x (d1+d2) matrix (plus a
    `ReconstructionDetails` when `return_details` is set).
    """
    n1, d1, d2 = bundle.n1, bundle.d1, bundle.d2
    if d2 == 0 or n1 == 0:
        out = bundle.prev_old.copy() if d2 == 0 else np.empty((0, d1 + d2))
        details = ReconstructionDetails(
            objective_trace=np.asarray([]),
            iterations=0,
            converged=True,
            centers=np.empty((0, d1 + d2)),
            assignment=np.asarray([], dtype=np.int64),
        )
        return (out, details) if return_details else out
    if bundle.n2 < opts.k:
        raise InsufficientDataError(f"{bundle.n2} current rows < k={opts.k}")

    best = None
    for seed in np.random.SeedSequence(opts.seed).spawn(opts.restarts):
        result = _reconstruct_single(bundle, opts, np.random.default_rng(seed))
        if best is None or result[5][-1] < best[5][-1]:
            best = result
    full, centers, labels, iters, converged, trace = best
    completed = full[:n1].copy()
    if return_details:
        return completed, ReconstructionDetails(
            objective_trace=trace,
            iterations=iters,
            converged=converged,
            centers=centers,
            assignment=labels,
        )
    return completed


def fit_dr(bundle: StageBundle, opts: FitOptions, init=None, return_completed: bool = False):
    """Reconstruct the first stage, then cluster the pooled full-dimensional data.

    With `return_completed` the completed first-stage matrix comes back too.
    """
    completed = reconstruct_missing(bundle, opts)
    stacked = np.vstack([completed, bundle.curr_full])
    report = lloyd_fit(stacked, opts, init=init)
    report.model = CentersModel(
        report.model.centers, block_split=(bundle.d1, bundle.d2), provenance="FIC-DR"
    )
    return (report, completed) if return_completed else report


def update_old_block(points_old, u0_s, theta: float) -> np.ndarray:
    """Closed-form old-block center: (sum of members + theta * prior) / (count + theta)."""
    u0 = np.ascontiguousarray(u0_s, dtype=np.float64).reshape(-1)
    pts = np.asarray(points_old, dtype=np.float64)
    if pts.size == 0:
        pts = pts.reshape(0, u0.size)
    elif pts.ndim == 1:
        pts = pts.reshape(-1, 1)
    if pts.shape[1] != u0.size:
        raise DimensionError(f"points have dim {pts.shape[1]}, prior has dim {u0.size}")
    if theta < 0:
        raise ConfigError("theta must be >= 0")
    if pts.shape[0] == 0 and theta == 0:
        raise DegenerateClusterError("empty cluster with theta=0 has no old-block update")
    return (pts.sum(axis=0) + theta * u0) / (pts.shape[0] + theta)


def update_new_block(points_new) -> np.ndarray:
    """Closed-form new-block center: the arithmetic mean of the members."""
    pts = np.asarray(points_new, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts.reshape(-1, 1)
    if pts.shape[0] == 0:
        raise DegenerateClusterError("empty cluster has no new-block update")
    return pts.sum(axis=0) / pts.shape[0]


def _mr_objective(curr, centers, u0c, theta, n2, d1) -> float:
    mins = nearest_centers(curr, centers)[1]
    reg = centers[:, :d1] - u0c
    return (mins.sum() + theta * np.einsum("kd,kd->", reg, reg)) / n2


def _mr_repair(curr, labels, centers, counts, u0c, theta, d1) -> None:
    # memberless centers: at theta=0 behave exactly like the plain engine;
    # otherwise snap the old block back onto the prior (its penalty optimum)
    # and reseed only the new block, which keeps the objective nonincreasing
    empty = np.flatnonzero(counts == 0)
    if empty.size == 0:
        return
    if theta == 0:
        repair_empty(curr, labels, centers, counts)
        return
    diff = curr - centers[labels]
    dist = np.einsum("nd,nd->n", diff, diff)
    for s in empty:
        j = int(dist.argmax())
        centers[s, :d1] = u0c[s]
        centers[s, d1:] = curr[j, d1:]
        dist[j] = -1.0


def _mr_single(curr, u0c, theta, opts: FitOptions, centers0, d1):
    centers = centers0.copy()
    n2 = curr.shape[0]
    k = opts.k
    trace = [_mr_objective(curr, centers, u0c, theta, n2, d1)]
    prev_labels = None
    converged = False
    it = 0
    for it in range(1, opts.max_iters + 1):
        labels, _ = nearest_centers(curr, centers)
        sums, counts = _cluster_means(curr, labels, k)
        nonempty = counts > 0
        denom = counts[nonempty, None] + theta
        centers[nonempty, :d1] = (sums[nonempty, :d1] + theta * u0c[nonempty]) / denom
        centers[nonempty, d1:] = sums[nonempty, d1:] / counts[nonempty, None]
        _mr_repair(curr, labels, centers, counts, u0c, theta, d1)
        obj = _mr_objective(curr, centers, u0c, theta, n2, d1)
        trace.append(obj)
        if prev_labels is not None and np.array_equal(labels, prev_labels):
            converged = True
            break
        if _rel_change(trace[-2], obj) < opts.rel_tol:
            converged = True
            break
        prev_labels = labels
    return centers, it, converged, np.asarray(trace)


def fit_mr(bundle: StageBundle, u0: CentersModel, opts: MrOptions, init=None) -> FitReport:
    """Cluster the second stage with old-block centers tethered to a pretrained model.

    Minimizes the per-sample clustering risk plus `theta` times the squared
    deviation of the old-feature center block from `u0`, by alternating
    nearest-center assignment with the closed-form block updates. The
    reported `risk` is the regularized value (mean data risk plus
    theta * squared prior deviation); `data_risk` is the plain clustering
    risk of the final centers, comparable across algorithms.
    """
    base = opts.base
    d1, d2 = bundle.d1, bundle.d2
    if u0.k != base.k:
        raise ConfigError(f"pretrained model has k={u0.k}, options ask k={base.k}")
    if u0.dim != d1:
        raise DimensionError(f"pretrained model dim {u0.dim} != d1={d1}")
    if bundle.n2 < 1:
        raise InsufficientDataError("model reuse needs at least one current-stage row")
    curr = bundle.curr_full
    u0c = u0.centers
    theta = float(opts.theta)

    if init is not None:
        c0 = init.centers if isinstance(init, CentersModel) else np.asarray(init, dtype=np.float64)
        c0 = np.atleast_2d(c0).astype(np.float64)
        if c0.shape != (base.k, d1 + d2):
            raise DimensionError(f"init centers shape {c0.shape} != ({base.k}, {d1 + d2})")
        starts = [c0]
    else:
        starts = []
        for seed in np.random.SeedSequence(base.seed).spawn(base.restarts):
            rng = np.random.default_rng(seed)
            starts.append(np.hstack([u0c.copy(), _mr_new_block_init(bundle, base.k, rng)]))

    best = None
    for centers0 in starts:
        result = _mr_single(curr, u0c, theta, base, centers0, d1)
        if best is None or result[3][-1] < best[3][-1]:
            best = result
    centers, iters, converged, trace = best

    model = CentersModel(centers, block_split=(d1, d2), provenance="FIC-MR")
    labels, mins = nearest_centers(curr, centers)
    data_risk = _uniform_weighted(mins)
    reg = centers[:, :d1] - u0c
    risk = data_risk + theta * float(np.einsum("kd,kd->", reg, reg))
    return FitReport(
        model=model,
        assignment=labels,
        risk=risk,
        data_risk=data_risk,
        iterations=iters,
        converged=converged,
        risk_trace=trace,
    )


def _mr_new_block_init(bundle: StageBundle, k: int, rng: np.random.Generator) -> np.ndarray:
    """Spread seeding over the new-feature block, recycling rows if k exceeds them."""
    d2, n2 = bundle.d2, bundle.n2
    if d2 == 0:
        return np.empty((k, 0))
    new = bundle.curr_new_block()
    first = int(rng.integers(n2))
    chosen = [first]
    diff = new - new[first]
    min_sq = np.einsum("nd,nd->n", diff, diff)
    while len(chosen) < k:
        j = int(min_sq.argmax())
        if min_sq[j] <= 0.0:
            # no distinct row left; recycle rows so k centers always exist
            chosen.append(len(chosen) % n2)
            continue
        chosen.append(j)
        diff = new - new[j]
        min_sq = np.minimum(min_sq, np.einsum("nd,nd->n", diff, diff))
    return new[chosen].copy()
