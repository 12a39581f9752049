"""Command-line entry points: prep, train, eval, sweep, audit."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .boost import Ensemble, FabConfig, train_fab
from .bound import bound_report_to_dict, verify_bound
from .dataset import DatasetSchema, load_csv, write_csv
from .errors import DegenerateRangeError, FairboostError
from .harness import load_experiment_config, run_experiment
from .metrics import accuracy, confusion, fairness_loss, signed_gap
from .preprocess import FairnessIndicator, balance_by_group, lambda_max
from .tree import TreeConfig


def _load(data_path: str, schema_path: str):
    schema = DatasetSchema.from_json_file(schema_path)
    return load_csv(data_path, schema), schema


def _maybe_balance(ds, balance: str, seed: int):
    if balance == "none":
        return ds
    return balance_by_group(ds, also_balance_labels=(balance == "group_and_label"), seed=seed)


def _lambda_report(ds) -> dict:
    report = {}
    for ind in FairnessIndicator:
        try:
            report[ind.value] = lambda_max(ds, ind).hi
        except DegenerateRangeError:
            report[ind.value] = None
    return report


def cmd_prep(args) -> int:
    ds, schema = _load(args.data, args.schema)
    n_loaded = ds.n
    ds = _maybe_balance(ds, args.balance, args.seed)
    n0, n1 = ds.group_counts()
    report = {
        "n_loaded": n_loaded,
        "n_after_balance": ds.n,
        "group_counts": {"unfavored": n0, "favored": n1},
        "lambda_max": _lambda_report(ds),
        "schema_fingerprint": ds.schema_fingerprint,
    }
    if args.out:
        write_csv(ds, args.out, schema)
        report["out"] = args.out
    print(json.dumps(report, indent=2, sort_keys=True))
    return 0


def cmd_train(args) -> int:
    ds, _ = _load(args.data, args.schema)
    ds = _maybe_balance(ds, args.balance, args.seed)
    cfg = FabConfig(
        rounds=args.rounds,
        lam=args.lam,
        indicator=FairnessIndicator(args.indicator),
        tree=TreeConfig(max_depth=args.max_depth, min_leaf_weight=args.min_leaf_weight),
        clamp_lambda=args.clamp_lambda,
    )
    ens = train_fab(ds, cfg)
    Path(args.out).write_bytes(ens.to_json_bytes() + b"\n")
    pred = ens.predict_batch(ds.X)
    print(
        json.dumps(
            {
                "model": args.out,
                "lambda_effective": ens.lam_effective,
                "train_accuracy": accuracy(pred, ds.y),
                "train_fairness_loss": fairness_loss(pred, ds, ens.indicator),
            },
            indent=2,
            sort_keys=True,
        )
    )
    return 0


def _load_model(path: str) -> Ensemble:
    with open(path, encoding="utf-8") as fh:
        return Ensemble.from_dict(json.load(fh))


def cmd_eval(args) -> int:
    ds, _ = _load(args.data, args.schema)
    ens = _load_model(args.model)
    pred = ens.predict_batch(ds.X)
    conf = confusion(pred, ds)
    report = {
        "indicator": ens.indicator.value,
        "accuracy": accuracy(pred, ds.y),
        "fairness_loss": fairness_loss(pred, ds, ens.indicator),
        "signed_gap": signed_gap(pred, ds, ens.indicator),
        "confusion": {
            "unfavored": vars(conf.unfavored).copy(),
            "favored": vars(conf.favored).copy(),
        },
    }
    print(json.dumps(report, indent=2, sort_keys=True))
    return 0


def cmd_audit(args) -> int:
    ds, _ = _load(args.data, args.schema)
    ens = _load_model(args.model)
    report = bound_report_to_dict(verify_bound(ens, ds))
    report["lambda_effective"] = ens.lam_effective
    print(json.dumps(report, indent=2, sort_keys=True))
    return 0


def cmd_sweep(args) -> int:
    cfg = load_experiment_config(args.config)
    result = run_experiment(cfg, save_models=not args.no_models)
    print(
        json.dumps(
            {
                "output_dir": str(cfg.output_dir),
                "n_records": len(result["records"]),
                "results": str(Path(cfg.output_dir) / "results.json"),
            },
            indent=2,
            sort_keys=True,
        )
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fairboost", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_data_args(p):
        p.add_argument("--data", required=True, help="CSV file with a header row")
        p.add_argument("--schema", required=True, help="schema JSON file")

    p = sub.add_parser("prep", help="load, balance, and report admissible lambda ranges")
    add_data_args(p)
    p.add_argument("--balance", choices=["none", "group", "group_and_label"], default="group")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write the balanced dataset to this CSV path")
    p.set_defaults(func=cmd_prep)

    p = sub.add_parser("train", help="train a single model on the (optionally balanced) file")
    add_data_args(p)
    p.add_argument("--indicator", choices=[i.value for i in FairnessIndicator], required=True)
    p.add_argument("--lam", type=float, required=True, help="fairness trade-off weight")
    p.add_argument("--rounds", type=int, default=30, help="boosting rounds T")
    p.add_argument("--max-depth", type=int, default=3)
    p.add_argument("--min-leaf-weight", type=float, default=0.0)
    p.add_argument("--balance", choices=["none", "group", "group_and_label"], default="none")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--clamp-lambda", action="store_true")
    p.add_argument("--out", required=True, help="model JSON output path")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate a model JSON on a dataset")
    add_data_args(p)
    p.add_argument("--model", required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("audit", help="verify the training-objective bound of a model")
    add_data_args(p)
    p.add_argument("--model", required=True)
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("sweep", help="run a full experiment config")
    p.add_argument("--config", required=True)
    p.add_argument("--no-models", action="store_true", help="skip per-model JSON files")
    p.set_defaults(func=cmd_sweep)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FairboostError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
