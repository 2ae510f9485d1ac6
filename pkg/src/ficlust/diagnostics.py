"""Theory-adjacent diagnostics: weighted risk discrepancy and prior-quality risk.

The discrepancy between two samples is the largest gap between their
clustering risks over a family of center configurations. The true supremum
is intractable, so it is bounded from below over a finite candidate set;
`discrepancy_candidates` builds the default set from already-fitted models
plus a batch of independently seeded k-means fits.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import CentersModel, _uniform_weighted, as_matrix, empirical_risk, nearest_centers
from .errors import ConfigError, DimensionError, NonFiniteValueError
from .kmeans import FitOptions, lloyd_fit

__all__ = [
    "WeightVector",
    "DiscrepancyEstimate",
    "weighted_risk",
    "estimate_discrepancy",
    "adaptation_risk",
    "discrepancy_candidates",
]


@dataclass(frozen=True, eq=False)
class WeightVector:
    """Nonnegative per-row weights, normalized to sum 1 at construction."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.ascontiguousarray(self.weights, dtype=np.float64).reshape(-1)
        if w.size == 0:
            raise ConfigError("weight vector is empty")
        if not np.isfinite(w).all():
            raise NonFiniteValueError("weights must be finite")
        if (w < 0).any():
            raise ConfigError("weights must be nonnegative")
        total = w.sum()
        if not total > 0:
            raise ConfigError("weights must not all be zero")
        w = w / total
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @classmethod
    def uniform(cls, n: int) -> "WeightVector":
        return cls(np.ones(int(n)))


@dataclass(frozen=True)
class DiscrepancyEstimate:
    """Best lower bound found, with the candidate attaining it."""

    value: float
    candidate_count: int
    attaining_candidate: int


def weighted_risk(D, w: WeightVector, model: CentersModel) -> float:
    """Weighted mean squared distance to the nearest center."""
    m = as_matrix(D)
    if w.weights.size != m.shape[0]:
        raise DimensionError(f"{w.weights.size} weights for {m.shape[0]} rows")
    if m.shape[1] != model.dim:
        raise DimensionError(f"data has {m.shape[1]} columns, model dim {model.dim}")
    _, mins = nearest_centers(m, model.centers)
    return float(np.dot(w.weights, mins))


def estimate_discrepancy(
    Dp, w: WeightVector, Dc, candidates: Sequence[CentersModel]
) -> DiscrepancyEstimate:
    """Max over candidates of |weighted risk on Dp - risk on Dc|.

    A lower bound on the true supremum over all center configurations;
    ties go to the lowest candidate index.
    """
    if len(candidates) == 0:
        raise ConfigError("candidate set is empty")
    mp = as_matrix(Dp)
    mc = as_matrix(Dc)
    dims = {u.dim for u in candidates}
    if len(dims) != 1 or mp.shape[1] != mc.shape[1] or mp.shape[1] not in dims:
        raise DimensionError("data matrices and candidates must share one dimension")
    gaps = np.asarray(
        [abs(weighted_risk(mp, w, u) - empirical_risk(mc, u)) for u in candidates]
    )
    best = int(gaps.argmax())
    return DiscrepancyEstimate(
        value=float(gaps[best]),
        candidate_count=len(candidates),
        attaining_candidate=best,
    )


def adaptation_risk(curr_old_block, u0: CentersModel) -> float:
    """Clustering risk of the pretrained centers on the current old-feature block.

    Low values mean the prior already sits in a low-risk region of the
    incoming data; reported alongside model-reuse fits.
    """
    return empirical_risk(curr_old_block, u0)


def discrepancy_candidates(
    matrices: Sequence[np.ndarray],
    k: int,
    seed: int,
    per_matrix: int = 32,
    fitted: Sequence[CentersModel] = (),
) -> list[CentersModel]:
    """Default candidate set: given models plus seeded k-means fits per matrix."""
    candidates = list(fitted)
    seeds = np.random.SeedSequence(seed).spawn(len(matrices) * per_matrix)
    i = 0
    for m in matrices:
        for _ in range(per_matrix):
            opts = FitOptions(
                k=k,
                restarts=1,
                seed=int(seeds[i].generate_state(1, np.uint64)[0]),
                init_strategy="uniform-random",
            )
            candidates.append(lloyd_fit(m, opts).model)
            i += 1
    return candidates
