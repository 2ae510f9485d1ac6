"""Command-line interface: fit, evaluate, reconstruct, experiment, synth, discrepancy."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .data import SplitSpec, SynthSpec, generate_synthetic, load_dataset, save_dataset, split_stages
from .data import normalize_bundle
from .diagnostics import WeightVector, estimate_discrepancy
from .errors import (
    ConfigError,
    DataError,
    FicError,
    ParseError,
)
from .experiment import (
    ALGORITHMS,
    ExperimentConfig,
    emit_report,
    eval_matrix_for,
    fit_baseline_c1,
    fit_baseline_p1,
    pretrain_previous,
    render_mean_std,
    run_experiment,
)
from .incremental import MrOptions, fit_da, fit_dr, fit_ft, fit_mr, reconstruct_missing
from .kmeans import FitOptions, predict
from .metrics import accuracy, nmi, pairwise_fscore
from .model_io import load_model, save_model
from .core import max_row_norm

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4


def _add_dataset_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--data", required=True, help="CSV file (old columns, new columns, label)")
    p.add_argument("--d1", type=int, required=True, help="old-feature column count")
    p.add_argument("--d2", type=int, required=True, help="new-feature column count")
    p.add_argument("--label-column", default=None, help="label column header, if any")


def _add_split_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--prev-fraction", type=float, default=0.5)
    p.add_argument("--test-fraction", type=float, default=0.2)
    p.add_argument("--ra", type=float, default=0.1, help="current-stage availability ratio")
    p.add_argument("--split-seed", type=int, default=0)
    p.add_argument("--normalization", default="none", choices=("none", "minmax", "zscore"))


def _add_fit_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=10)
    p.add_argument("--max-iters", type=int, default=300)
    p.add_argument("--rel-tol", type=float, default=1e-6)
    p.add_argument("--init", default="greedy-spread", choices=("greedy-spread", "uniform-random"))


def _bundle_from_args(args):
    matrix, labels = load_dataset(args.data, args.d1, args.d2, args.label_column)
    spec = SplitSpec(args.prev_fraction, args.test_fraction, args.ra, args.split_seed)
    bundle = split_stages(matrix, labels, args.d1, args.d2, spec)
    return normalize_bundle(bundle, args.normalization)


def _fit_options(args) -> FitOptions:
    return FitOptions(
        k=args.k,
        max_iters=args.max_iters,
        rel_tol=args.rel_tol,
        restarts=args.restarts,
        seed=args.seed,
        init_strategy=args.init,
    )


def _cmd_synth(args) -> int:
    spec = SynthSpec(
        k=args.k,
        n=args.n,
        d1=args.d1,
        d2=args.d2,
        separation=args.separation,
        new_feature_informativeness=args.informativeness,
        noise_sd=args.noise_sd,
        seed=args.seed,
    )
    matrix, labels = generate_synthetic(spec)
    save_dataset(args.out, matrix, labels, label_column=args.label_column)
    print(f"wrote {matrix.shape[0]} rows x {matrix.shape[1]} features to {args.out}")
    return EXIT_OK


def _cmd_fit(args) -> int:
    bundle = _bundle_from_args(args)
    opts = _fit_options(args)
    if args.algorithm == "KM-P1":
        report = fit_baseline_p1(bundle, opts)
    elif args.algorithm == "KM-C1":
        report = fit_baseline_c1(bundle, opts)
    elif args.algorithm == "FIC-FT":
        report = fit_ft(bundle, opts)
    elif args.algorithm == "FIC-DR":
        report = fit_dr(bundle, opts)
    elif args.algorithm == "FIC-DA":
        report = fit_da(bundle, opts)
    else:
        if args.model is not None:
            u0 = load_model(args.model)
        else:
            u0 = pretrain_previous(bundle, opts)
        report = fit_mr(bundle, u0, MrOptions(args.theta, opts))
    model = report.model
    print(f"algorithm:  {model.provenance}")
    print(f"k x dim:    {model.k} x {model.dim}")
    print(f"risk:       {report.risk!r}")
    print(f"data risk:  {report.data_risk!r}")
    print(f"iterations: {report.iterations} (converged: {report.converged})")
    print(f"data radius: {max_row_norm(bundle.curr_full)!r}")
    if args.save_model:
        save_model(model, args.save_model)
        print(f"model saved to {args.save_model}")
    return EXIT_OK


def _cmd_evaluate(args) -> int:
    model = load_model(args.model)
    matrix, labels = load_dataset(args.data, args.d1, args.d2, args.label_column)
    if labels is None:
        raise ConfigError("evaluate needs a label column")
    pred = predict(eval_matrix_for(model, matrix), model)
    print(f"acc:    {accuracy(pred, labels):.6f}")
    print(f"fscore: {pairwise_fscore(pred, labels):.6f}")
    print(f"nmi:    {nmi(pred, labels):.6f}")
    return EXIT_OK


def _cmd_reconstruct(args) -> int:
    bundle = _bundle_from_args(args)
    completed = reconstruct_missing(bundle, _fit_options(args))
    save_dataset(args.out, completed)
    print(f"wrote completed previous stage ({completed.shape[0]} rows) to {args.out}")
    return EXIT_OK


def _cmd_experiment(args) -> int:
    try:
        with open(args.config, encoding="utf-8") as fh:
            doc = json.load(fh)
    except FileNotFoundError:
        raise DataError(f"no such config file: {args.config}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{args.config}: invalid JSON: {exc}") from None
    config = ExperimentConfig.from_dict(doc)
    report = run_experiment(config)
    out_base = Path(args.out_dir or config.output or ".")
    out_base.mkdir(parents=True, exist_ok=True)
    table = emit_report(report, "table-csv", out_base / "report.csv")
    structured = emit_report(report, "structured", out_base / "report.json")
    for cell in report.cells:
        if cell.error is not None:
            print(f"{cell.algorithm} @ RA={cell.ra:g}: FAILED ({cell.error})")
            continue
        acc = cell.metrics["acc"]
        note = f" theta={cell.selected_theta:g}" if cell.selected_theta is not None else ""
        print(f"{cell.algorithm} @ RA={cell.ra:g}: ACC {render_mean_std(acc['mean'], acc['std'])}{note}")
    print(f"reports written to {table} and {structured}")
    return EXIT_OK


def _cmd_discrepancy(args) -> int:
    dp, _ = load_dataset(args.data_p, args.d1, args.d2, args.label_column)
    dc, _ = load_dataset(args.data_c, args.d1, args.d2, args.label_column)
    candidates = [load_model(p) for p in args.model]
    est = estimate_discrepancy(dp, WeightVector.uniform(dp.shape[0]), dc, candidates)
    print(f"discrepancy estimate: {est.value!r}")
    print(f"candidates evaluated: {est.candidate_count}")
    print(f"attained by candidate #{est.attaining_candidate} "
          f"({candidates[est.attaining_candidate].provenance})")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ficlust",
        description="Feature-incremental clustering toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic feature-incremental dataset CSV")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d1", type=int, required=True)
    p.add_argument("--d2", type=int, required=True)
    p.add_argument("--separation", type=float, default=5.0)
    p.add_argument("--informativeness", type=float, default=1.0)
    p.add_argument("--noise-sd", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--label-column", default="label")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("fit", help="fit one algorithm on one split and print the report")
    _add_dataset_args(p)
    _add_split_args(p)
    _add_fit_args(p)
    p.add_argument("--algorithm", required=True, choices=ALGORITHMS)
    p.add_argument("--theta", type=float, default=1.0, help="model-reuse trade-off")
    p.add_argument("--model", default=None, help="pretrained model file for FIC-MR")
    p.add_argument("--save-model", default=None)
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser("evaluate", help="score a saved model on a labeled CSV")
    p.add_argument("--model", required=True)
    _add_dataset_args(p)
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("reconstruct", help="emit the completed previous-stage matrix as CSV")
    _add_dataset_args(p)
    _add_split_args(p)
    _add_fit_args(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_reconstruct)

    p = sub.add_parser("experiment", help="run a config-driven benchmark and emit reports")
    p.add_argument("--config", required=True, help="JSON experiment config")
    p.add_argument("--out-dir", default=None)
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("discrepancy", help="risk-discrepancy estimate between two CSVs")
    p.add_argument("--data-p", required=True)
    p.add_argument("--data-c", required=True)
    p.add_argument("--d1", type=int, required=True)
    p.add_argument("--d2", type=int, required=True)
    p.add_argument("--label-column", default=None)
    p.add_argument("--model", action="append", required=True,
                   help="candidate model file (repeatable)")
    p.set_defaults(func=_cmd_discrepancy)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except FicError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
