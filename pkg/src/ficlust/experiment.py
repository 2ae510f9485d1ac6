"""Config-driven benchmark harness: algorithms x availability grid x seeded runs.

Each run derives all of its randomness (split shuffle, pretraining,
per-algorithm fits, diagnostic candidates) from `base_seed + run_index`
through fixed slots of a seed sequence, so reports are reproducible and
per-cell results do not depend on which other algorithms were requested.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import CentersModel, max_row_norm
from .data import (
    NORMALIZATION_MODES,
    SplitSpec,
    SynthSpec,
    generate_synthetic,
    load_dataset,
    normalize_bundle,
    split_stages,
)
from .diagnostics import (
    WeightVector,
    adaptation_risk,
    discrepancy_candidates,
    estimate_discrepancy,
)
from .errors import ConfigError, FicError, InsufficientDataError
from .incremental import MrOptions, StageBundle, fit_da, fit_dr, fit_ft, fit_mr
from .kmeans import FitOptions, FitReport, lloyd_fit, predict
from .metrics import accuracy, nmi, pairwise_fscore

__all__ = [
    "ALGORITHMS",
    "DEFAULT_RA_GRID",
    "DEFAULT_THETA_GRID",
    "DEFAULT_RUNS",
    "ExperimentConfig",
    "CellReport",
    "MetricsReport",
    "fit_baseline_p1",
    "fit_baseline_c1",
    "pretrain_previous",
    "run_experiment",
    "emit_report",
    "render_mean_std",
]

ALGORITHMS = ("KM-P1", "KM-C1", "FIC-FT", "FIC-DR", "FIC-DA", "FIC-MR")
DEFAULT_RA_GRID = (0.1, 0.2, 0.3, 0.4)
DEFAULT_THETA_GRID = (1.0, 10.0, 100.0, 1000.0)
DEFAULT_RUNS = 10
METRIC_NAMES = ("acc", "fscore", "nmi")

# seed-sequence slots, fixed so a cell's randomness never depends on which
# other algorithms were requested
_SLOT_SPLIT = 0
_SLOT_PRETRAIN = 1
_SLOT_ALGORITHM = {name: i + 2 for i, name in enumerate(ALGORITHMS)}
_SLOT_CANDIDATES = 8


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything one benchmark needs: data source, grids, seeds, output."""

    k: int
    csv_path: str | None = None
    d1: int | None = None
    d2: int | None = None
    label_column: str | None = None
    synth: SynthSpec | None = None
    algorithms: tuple[str, ...] = ALGORITHMS
    ra_grid: tuple[float, ...] = DEFAULT_RA_GRID
    theta_grid: tuple[float, ...] = DEFAULT_THETA_GRID
    runs: int = DEFAULT_RUNS
    base_seed: int = 0
    normalization: str = "none"
    prev_fraction: float = 0.5
    test_fraction: float = 0.2
    max_iters: int = 300
    rel_tol: float = 1e-6
    restarts: int = 10
    init_strategy: str = "greedy-spread"
    candidate_models: int = 32
    output: str | None = None

    def __post_init__(self):
        if self.k < 1:
            raise ConfigError("k must be >= 1")
        if (self.csv_path is None) == (self.synth is None):
            raise ConfigError("config needs exactly one of a CSV source or a synth spec")
        if self.csv_path is not None and (self.d1 is None or self.d2 is None):
            raise ConfigError("a CSV source needs d1 and d2")
        for a in self.algorithms:
            if a not in ALGORITHMS:
                raise ConfigError(f"unknown algorithm {a!r}")
        if len(self.algorithms) != len(set(self.algorithms)):
            raise ConfigError("duplicate algorithm requested")
        for ra in self.ra_grid:
            if not (0 < ra <= 1):
                raise ConfigError(f"ra={ra} outside (0, 1]")
        for theta in self.theta_grid:
            if theta < 0:
                raise ConfigError(f"theta={theta} must be >= 0")
        if self.runs < 1:
            raise ConfigError("runs must be >= 1")
        if self.normalization not in NORMALIZATION_MODES:
            raise ConfigError(f"unknown normalization {self.normalization!r}")
        object.__setattr__(self, "algorithms", tuple(self.algorithms))
        object.__setattr__(self, "ra_grid", tuple(float(r) for r in self.ra_grid))
        object.__setattr__(self, "theta_grid", tuple(float(t) for t in self.theta_grid))

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentConfig":
        """Build a config from a parsed document, rejecting unknown keys."""
        if not isinstance(doc, dict):
            raise ConfigError("config document must be a mapping")
        doc = dict(doc)
        kwargs: dict = {}
        dataset = doc.pop("dataset", None)
        if dataset is not None:
            if not isinstance(dataset, dict) or len(dataset) != 1:
                raise ConfigError("dataset must be {'csv': {...}} or {'synth': {...}}")
            kind, body = next(iter(dataset.items()))
            if kind == "csv":
                kwargs.update(_take(body, {"path": "csv_path", "d1": "d1", "d2": "d2",
                                           "label_column": "label_column"}, "dataset.csv"))
            elif kind == "synth":
                allowed = {f: f for f in ("k", "n", "d1", "d2", "separation",
                                          "new_feature_informativeness", "noise_sd", "seed")}
                kwargs["synth"] = SynthSpec(**_take(body, allowed, "dataset.synth"))
            else:
                raise ConfigError(f"unknown dataset kind {kind!r}")
        split = doc.pop("split", None)
        if split is not None:
            kwargs.update(_take(split, {"prev_fraction": "prev_fraction",
                                        "test_fraction": "test_fraction"}, "split"))
        fit = doc.pop("fit", None)
        if fit is not None:
            kwargs.update(_take(fit, {f: f for f in ("max_iters", "rel_tol", "restarts",
                                                     "init_strategy")}, "fit"))
        top = {f: f for f in ("k", "algorithms", "ra_grid", "theta_grid", "runs",
                              "base_seed", "normalization", "candidate_models", "output")}
        kwargs.update(_take(doc, top, "config"))
        if "algorithms" in kwargs:
            kwargs["algorithms"] = tuple(kwargs["algorithms"])
        if "ra_grid" in kwargs:
            kwargs["ra_grid"] = tuple(kwargs["ra_grid"])
        if "theta_grid" in kwargs:
            kwargs["theta_grid"] = tuple(kwargs["theta_grid"])
        return cls(**kwargs)

    def to_dict(self) -> dict:
        synth = None
        if self.synth is not None:
            synth = {f: getattr(self.synth, f) for f in
                     ("k", "n", "d1", "d2", "separation", "new_feature_informativeness",
                      "noise_sd", "seed")}
        return {
            "k": self.k,
            "dataset": ({"synth": synth} if synth is not None else
                        {"csv": {"path": self.csv_path, "d1": self.d1, "d2": self.d2,
                                 "label_column": self.label_column}}),
            "algorithms": list(self.algorithms),
            "ra_grid": list(self.ra_grid),
            "theta_grid": list(self.theta_grid),
            "runs": self.runs,
            "base_seed": self.base_seed,
            "normalization": self.normalization,
            "split": {"prev_fraction": self.prev_fraction, "test_fraction": self.test_fraction},
            "fit": {"max_iters": self.max_iters, "rel_tol": self.rel_tol,
                    "restarts": self.restarts, "init_strategy": self.init_strategy},
            "candidate_models": self.candidate_models,
            "output": self.output,
        }


def _take(body, allowed: dict, where: str) -> dict:
    if not isinstance(body, dict):
        raise ConfigError(f"{where} must be a mapping")
    unknown = set(body) - set(allowed)
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")
    return {allowed[k]: v for k, v in body.items()}


@dataclass
class CellReport:
    """Aggregated scores for one (algorithm, availability ratio) cell."""

    algorithm: str
    ra: float
    runs: int
    metrics: dict | None = None  # metric name -> {mean, std, values}
    selected_theta: float | None = None
    theta_scan: list | None = None  # [theta, mean acc] pairs, grid order
    diagnostics: dict = field(default_factory=dict)
    error: str | None = None

    def to_dict(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "ra": self.ra,
            "runs": self.runs,
            "metrics": self.metrics,
            "selected_theta": self.selected_theta,
            "theta_scan": self.theta_scan,
            "diagnostics": self.diagnostics,
            "error": self.error,
        }


@dataclass
class MetricsReport:
    """All cells of one experiment plus the config that produced them."""

    config: dict
    cells: list
    theta_tuned_per_cell: bool = True

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "theta_tuned_per_cell": self.theta_tuned_per_cell,
            "cells": [c.to_dict() for c in self.cells],
        }

    def cell(self, algorithm: str, ra: float) -> CellReport:
        for c in self.cells:
            if c.algorithm == algorithm and c.ra == ra:
                return c
        raise KeyError((algorithm, ra))


def fit_baseline_p1(bundle: StageBundle, opts: FitOptions, init=None) -> FitReport:
    """Plain k-means on the previous stage's old features."""
    report = lloyd_fit(bundle.prev_old, opts, init=init)
    report.model = report.model.retag("KM-P1")
    return report


def fit_baseline_c1(bundle: StageBundle, opts: FitOptions, init=None) -> FitReport:
    """Plain k-means on the current stage's old-feature block."""
    if bundle.n2 < opts.k:
        raise InsufficientDataError(f"{bundle.n2} current rows < k={opts.k}")
    report = lloyd_fit(bundle.curr_old_block(), opts, init=init)
    report.model = report.model.retag("KM-C1")
    return report


def pretrain_previous(bundle: StageBundle, opts: FitOptions) -> CentersModel:
    """Pretrained old-feature centers, the prior consumed by model reuse."""
    return lloyd_fit(bundle.prev_old, opts).model.retag("pretrain")


def eval_matrix_for(model: CentersModel, test: np.ndarray) -> np.ndarray:
    """Old-feature-only models see only the test matrix's old block."""
    return test[:, : model.dim] if model.dim < test.shape[1] else test


def _evaluate(model: CentersModel, test: np.ndarray, labels_test) -> dict:
    pred = predict(eval_matrix_for(model, test), model)
    return {
        "acc": accuracy(pred, labels_test),
        "fscore": pairwise_fscore(pred, labels_test),
        "nmi": nmi(pred, labels_test),
    }


def _run_slots(base_seed: int, run_idx: int) -> list[int]:
    state = np.random.SeedSequence(int(base_seed) + run_idx).generate_state(16, np.uint64)
    return [int(s) for s in state]


def _summary(values: list[float]) -> dict:
    a = np.asarray(values, dtype=np.float64)
    return {"mean": float(a.mean()), "std": float(a.std()), "values": [float(v) for v in a]}


def load_source(config: ExperimentConfig):
    """Materialize the configured data source as (matrix, labels)."""
    if config.synth is not None:
        return generate_synthetic(config.synth)
    return load_dataset(config.csv_path, config.d1, config.d2, config.label_column)


def run_experiment(config: ExperimentConfig) -> MetricsReport:
    """Run every requested algorithm over the availability grid and seeds.

    Per run: shuffle-split the dataset, pretrain the old-feature prior,
    fit each algorithm, and score its test-set predictions. The model-reuse
    trade-off is scanned over `theta_grid` and, per cell, the value with
    the best mean accuracy across runs is reported. A failing algorithm is
    recorded in its own cell and never disturbs the others.
    """
    data, labels = load_source(config)
    if labels is None:
        raise ConfigError("experiment evaluation needs a labeled dataset")
    d1 = config.d1 if config.csv_path is not None else config.synth.d1
    d2 = config.d2 if config.csv_path is not None else config.synth.d2
    requested = [a for a in ALGORITHMS if a in config.algorithms]

    cells: dict[tuple[str, float], CellReport] = {}
    for ra in config.ra_grid:
        per_alg = {a: {"metrics": {m: [] for m in METRIC_NAMES},
                       "diag": {}, "error": None} for a in requested}
        theta_runs = {theta: {m: [] for m in METRIC_NAMES} for theta in config.theta_grid}
        for run_idx in range(config.runs):
            slots = _run_slots(config.base_seed, run_idx)
            try:
                bundle = split_stages(
                    data, labels, d1, d2,
                    SplitSpec(config.prev_fraction, config.test_fraction, ra, seed=slots[_SLOT_SPLIT]),
                )
                bundle = normalize_bundle(bundle, config.normalization)
            except FicError as exc:
                for a in requested:
                    per_alg[a]["error"] = per_alg[a]["error"] or f"split: {exc}"
                continue
            full_models: list[CentersModel] = []
            completed = None
            for alg in requested:
                state = per_alg[alg]
                if state["error"] is not None:
                    continue
                opts = FitOptions(
                    k=config.k,
                    max_iters=config.max_iters,
                    rel_tol=config.rel_tol,
                    restarts=config.restarts,
                    seed=slots[_SLOT_ALGORITHM[alg]],
                    init_strategy=config.init_strategy,
                )
                try:
                    if alg == "KM-P1":
                        report = fit_baseline_p1(bundle, opts)
                        train = bundle.prev_old
                    elif alg == "KM-C1":
                        report = fit_baseline_c1(bundle, opts)
                        train = bundle.curr_old_block()
                    elif alg == "FIC-FT":
                        report = fit_ft(bundle, opts)
                        train = np.vstack([bundle.prev_old, bundle.curr_old_block()])
                    elif alg == "FIC-DR":
                        report, completed = fit_dr(bundle, opts, return_completed=True)
                        train = np.vstack([completed, bundle.curr_full])
                        full_models.append(report.model)
                    elif alg == "FIC-DA":
                        report = fit_da(bundle, opts)
                        train = bundle.curr_full
                        full_models.append(report.model)
                    else:  # FIC-MR
                        pre_opts = FitOptions(
                            k=config.k,
                            max_iters=config.max_iters,
                            rel_tol=config.rel_tol,
                            restarts=config.restarts,
                            seed=slots[_SLOT_PRETRAIN],
                            init_strategy=config.init_strategy,
                        )
                        u0 = pretrain_previous(bundle, pre_opts)
                        for theta in config.theta_grid:
                            mr_report = fit_mr(bundle, u0, MrOptions(theta, opts))
                            scores = _evaluate(mr_report.model, bundle.test_full, bundle.labels_test)
                            for m in METRIC_NAMES:
                                theta_runs[theta][m].append(scores[m])
                            full_models.append(mr_report.model)
                        state["diag"].setdefault("adaptation_risk", []).append(
                            adaptation_risk(bundle.curr_old_block(), u0)
                        )
                        state["diag"].setdefault("gamma", []).append(max_row_norm(bundle.curr_full))
                        continue
                    scores = _evaluate(report.model, bundle.test_full, bundle.labels_test)
                    for m in METRIC_NAMES:
                        state["metrics"][m].append(scores[m])
                    state["diag"].setdefault("gamma", []).append(max_row_norm(train))
                except FicError as exc:
                    state["error"] = f"{type(exc).__name__}: {exc}"
            # reconstruction-quality diagnostic for the data-reconstruction cell
            dr = per_alg.get("FIC-DR")
            if dr is not None and dr["error"] is None and completed is not None and completed.shape[0] > 0:
                cands = discrepancy_candidates(
                    [completed, bundle.curr_full],
                    config.k,
                    seed=slots[_SLOT_CANDIDATES],
                    per_matrix=config.candidate_models,
                    fitted=full_models,
                )
                est = estimate_discrepancy(
                    completed, WeightVector.uniform(completed.shape[0]), bundle.curr_full, cands
                )
                dr["diag"].setdefault("discrepancy", []).append(est.value)

        for alg in requested:
            state = per_alg[alg]
            cell = CellReport(algorithm=alg, ra=ra, runs=config.runs)
            if state["error"] is not None:
                cell.error = state["error"]
            elif alg == "FIC-MR":
                scan = [(theta, float(np.mean(theta_runs[theta]["acc"])))
                        for theta in config.theta_grid]
                best_idx = int(np.argmax([s[1] for s in scan]))
                best_theta = config.theta_grid[best_idx]
                cell.selected_theta = float(best_theta)
                cell.theta_scan = [[float(t), m] for t, m in scan]
                cell.metrics = {m: _summary(theta_runs[best_theta][m]) for m in METRIC_NAMES}
            else:
                cell.metrics = {m: _summary(state["metrics"][m]) for m in METRIC_NAMES}
            if state["error"] is None:
                cell.diagnostics = {name: _summary(vals) for name, vals in state["diag"].items()}
            cells[(alg, ra)] = cell

    ordered = [cells[(alg, ra)] for alg in config.algorithms for ra in config.ra_grid]
    return MetricsReport(config=config.to_dict(), cells=ordered)


def render_mean_std(mean: float, std: float) -> str:
    """Three-decimal `mean(std)` cell, e.g. 0.772(0.055)."""
    return f"{mean:.3f}({std:.3f})"


def emit_report(report: MetricsReport, format: str, path) -> Path:
    """Write the report as `table-csv` (one row per cell metric) or `structured` JSON."""
    out = Path(path)
    if format == "table-csv":
        with open(out, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["algorithm", "ra", "metric", "mean", "std", "rendered"])
            for cell in report.cells:
                if cell.metrics is None:
                    continue
                for m in METRIC_NAMES:
                    s = cell.metrics[m]
                    writer.writerow([
                        cell.algorithm,
                        cell.ra,
                        m,
                        f"{s['mean']:.3f}",
                        f"{s['std']:.3f}",
                        render_mean_std(s["mean"], s["std"]),
                    ])
    elif format == "structured":
        with open(out, "w", encoding="utf-8") as fh:
            json.dump(report.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")
    else:
        raise ConfigError(f"unknown report format {format!r}")
    return out
