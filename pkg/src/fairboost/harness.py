"""Experiment driver: seeded sweeps over trade-off weights, aggregation, export.

One experiment = load CSV -> balance -> per-seed 70/30 split -> per-lambda
training (plus a vanilla AdaBoost baseline per seed) -> evaluation on both
splits -> bound audit on the training split -> aggregation.  Within one seed
every lambda shares the same balanced data and the same split, so a lambda
sweep is a controlled comparison.  Reruns of the same config produce
byte-identical results apart from wall-clock fields.
"""

from __future__ import annotations

import csv
import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .boost import Ensemble, FabConfig, train_adaboost, train_fab
from .bound import bound_report_to_dict, verify_bound
from .dataset import Dataset, DatasetSchema, load_csv
from .errors import ContractError, LambdaRangeError, ResampleNeededError
from .metrics import accuracy, fairness_loss, signed_gap
from .preprocess import FairnessIndicator, balance_by_group, lambda_max, split_train_test
from .tree import TreeConfig

_BALANCE_TAG = 0xBA7A
_SPLIT_TAG = 0x59B1
_MAX_SPLIT_ATTEMPTS = 10

#: Metrics aggregated per (method, lambda) cell.
RECORD_METRICS = (
    "train_accuracy",
    "test_accuracy",
    "train_fairness_loss",
    "test_fairness_loss",
    "train_signed_gap",
    "test_signed_gap",
)


@dataclass(frozen=True)
class ExperimentConfig:
    dataset_path: Path
    schema_path: Path
    indicator: FairnessIndicator
    lambdas: tuple[float, ...]
    rounds: int
    output_dir: Path
    seeds: tuple[int, ...] = tuple(range(20))
    train_fraction: float = 0.7
    tree: TreeConfig = field(default_factory=TreeConfig)
    balance: str = "group"
    clamp_lambda: bool = False

    def __post_init__(self):
        if not self.lambdas:
            raise ContractError("lambdas must be non-empty")
        if any(lam < 0 for lam in self.lambdas):
            raise ContractError("lambdas must be >= 0")
        if not self.seeds:
            raise ContractError("seeds must be non-empty")
        if self.balance not in ("group", "group_and_label"):
            raise ContractError(f"balance must be 'group' or 'group_and_label', got {self.balance!r}")
        if self.rounds < 1:
            raise ContractError("T must be >= 1")

    def to_dict(self) -> dict:
        return {
            "dataset_path": str(self.dataset_path),
            "schema_path": str(self.schema_path),
            "indicator": self.indicator.value,
            "lambdas": list(self.lambdas),
            "T": self.rounds,
            "seeds": list(self.seeds),
            "train_fraction": self.train_fraction,
            "tree": {"max_depth": self.tree.max_depth, "min_leaf_weight": self.tree.min_leaf_weight},
            "balance": self.balance,
            "clamp_lambda": self.clamp_lambda,
            "output_dir": str(self.output_dir),
        }


def load_experiment_config(path: str | Path) -> ExperimentConfig:
    """Parse a config JSON file; relative paths resolve against its directory."""
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    base = path.parent

    def resolve(p: str) -> Path:
        p = Path(p)
        return p if p.is_absolute() else base / p

    tree_doc = doc.get("tree", {})
    return ExperimentConfig(
        dataset_path=resolve(doc["dataset_path"]),
        schema_path=resolve(doc["schema_path"]),
        indicator=FairnessIndicator(doc["indicator"]),
        lambdas=tuple(float(v) for v in doc["lambdas"]),
        rounds=int(doc["T"]),
        output_dir=resolve(doc["output_dir"]),
        seeds=tuple(int(s) for s in doc.get("seeds", range(20))),
        train_fraction=float(doc.get("train_fraction", 0.7)),
        tree=TreeConfig(
            max_depth=int(tree_doc.get("max_depth", 3)),
            min_leaf_weight=float(tree_doc.get("min_leaf_weight", 0.0)),
        ),
        balance=doc.get("balance", "group"),
        clamp_lambda=bool(doc.get("clamp_lambda", False)),
    )


def subseed(seed: int, tag: int, attempt: int = 0) -> int:
    """Deterministic 64-bit stream seed derived from (seed, purpose, attempt)."""
    ss = np.random.SeedSequence([int(seed), int(tag), int(attempt)])
    return int(ss.generate_state(1, np.uint64)[0])


def _split_with_retries(ds: Dataset, fraction: float, seed: int) -> tuple[Dataset, Dataset]:
    last: ResampleNeededError | None = None
    for attempt in range(_MAX_SPLIT_ATTEMPTS):
        try:
            return split_train_test(ds, fraction, subseed(seed, _SPLIT_TAG, attempt))
        except ResampleNeededError as exc:
            last = exc
    raise ResampleNeededError(
        f"no valid split after {_MAX_SPLIT_ATTEMPTS} attempts for seed {seed}"
    ) from last


def _evaluate(ens: Ensemble, train: Dataset, test: Dataset) -> dict:
    pred_train = ens.predict_batch(train.X)
    pred_test = ens.predict_batch(test.X)
    ind = ens.indicator
    return {
        "train_accuracy": accuracy(pred_train, train.y),
        "test_accuracy": accuracy(pred_test, test.y),
        "train_fairness_loss": fairness_loss(pred_train, train, ind),
        "test_fairness_loss": fairness_loss(pred_test, test, ind),
        "train_signed_gap": signed_gap(pred_train, train, ind),
        "test_signed_gap": signed_gap(pred_test, test, ind),
        "bound": bound_report_to_dict(verify_bound(ens, train)),
    }


def aggregate(records: list[dict]) -> list[dict]:
    """Per-(method, lambda) means and sample standard deviations.

    Rows come back sorted by method then ascending lambda.  A single record
    aggregates to std 0.
    """
    groups: dict[tuple[str, float], list[dict]] = {}
    for rec in records:
        groups.setdefault((rec["method"], rec["lambda"]), []).append(rec)

    rows = []
    for (method, lam) in sorted(groups, key=lambda k: (k[0], k[1])):
        cell = groups[(method, lam)]
        row = {"method": method, "lambda": lam, "n_records": len(cell)}
        for metric in RECORD_METRICS:
            values = np.array([rec[metric] for rec in cell], dtype=np.float64)
            row[f"mean_{metric}"] = float(values.mean())
            row[f"std_{metric}"] = float(values.std(ddof=1)) if len(values) > 1 else 0.0
        rows.append(row)
    return rows


def emit_plot_data(result: dict, output_dir: str | Path) -> list[Path]:
    """Write per-split trade-off CSVs (lambda ascending, baseline as lambda 0).

    Columns: lambda, mean_accuracy, std_accuracy, mean_fairness_loss,
    std_fairness_loss.  Enough to reproduce accuracy-versus-fairness scatter
    plots for the sweep plus the vanilla AdaBoost point.
    """
    output_dir = Path(output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for split in ("train", "test"):
        rows: dict[float, list] = {}
        for agg in result.get("aggregates", []):
            lam = agg["lambda"]
            if agg["method"] == "adaboost" and lam in rows:
                continue
            rows[lam] = [
                lam,
                agg[f"mean_{split}_accuracy"],
                agg[f"std_{split}_accuracy"],
                agg[f"mean_{split}_fairness_loss"],
                agg[f"std_{split}_fairness_loss"],
            ]
        path = output_dir / f"plotdata_{split}.csv"
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                ["lambda", "mean_accuracy", "std_accuracy", "mean_fairness_loss", "std_fairness_loss"]
            )
            for lam in sorted(rows):
                writer.writerow([repr(v) for v in rows[lam]])
        paths.append(path)
    return paths


def _write_summary_csv(aggregates: list[dict], path: Path) -> None:
    if not aggregates:
        header = ["method", "lambda", "n_records"]
    else:
        header = list(aggregates[0].keys())
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in aggregates:
            writer.writerow([row[k] if isinstance(row[k], (str, int)) else repr(row[k]) for k in header])


def run_experiment(cfg: ExperimentConfig, save_models: bool = True) -> dict:
    """Run the full sweep described by ``cfg`` and persist results.

    Returns the results document that is also written to
    ``output_dir/results.json``.  Fails fast with the computed admissible
    maximum when a requested lambda is out of range and clamping is off.
    """
    schema = DatasetSchema.from_json_file(cfg.schema_path)
    full = load_csv(cfg.dataset_path, schema)

    records: list[dict] = []
    lambda_max_by_seed: dict[str, float] = {}
    n_balanced_by_seed: dict[str, int] = {}
    models: dict[str, Ensemble] = {}

    for seed in cfg.seeds:
        balanced = balance_by_group(
            full,
            also_balance_labels=(cfg.balance == "group_and_label"),
            seed=subseed(seed, _BALANCE_TAG),
        )
        train, test = _split_with_retries(balanced, cfg.train_fraction, seed)
        admissible = lambda_max(train, cfg.indicator)
        lambda_max_by_seed[str(seed)] = admissible.hi
        n_balanced_by_seed[str(seed)] = balanced.n
        if not cfg.clamp_lambda:
            worst = max(cfg.lambdas)
            if not admissible.contains(worst):
                raise LambdaRangeError(
                    f"lambda {worst} exceeds admissible maximum {admissible.hi} "
                    f"on the seed-{seed} training split (enable clamp_lambda to saturate)"
                )

        started = time.perf_counter()
        baseline = train_adaboost(
            train, cfg.rounds, cfg.tree, indicator=cfg.indicator
        )
        rec = {
            "method": "adaboost",
            "lambda": 0.0,
            "lambda_effective": 0.0,
            "lambda_clamped": False,
            "seed": seed,
            **_evaluate(baseline, train, test),
            "wall_clock_sec": time.perf_counter() - started,
        }
        records.append(rec)
        models[f"model_adaboost_{seed}.json"] = baseline

        for lam in sorted(cfg.lambdas):
            started = time.perf_counter()
            ens = train_fab(
                train,
                FabConfig(
                    rounds=cfg.rounds,
                    lam=lam,
                    indicator=cfg.indicator,
                    tree=cfg.tree,
                    clamp_lambda=cfg.clamp_lambda,
                ),
            )
            rec = {
                "method": "fab",
                "lambda": lam,
                "lambda_effective": ens.lam_effective,
                "lambda_clamped": ens.lam_effective != lam,
                "seed": seed,
                **_evaluate(ens, train, test),
                "wall_clock_sec": time.perf_counter() - started,
            }
            records.append(rec)
            models[f"model_{lam!r}_{seed}.json"] = ens

    records.sort(key=lambda r: (r["method"], r["lambda"], r["seed"]))
    result = {
        "config": cfg.to_dict(),
        "schema_fingerprint": full.schema_fingerprint,
        "n_loaded": full.n,
        "n_after_balance": n_balanced_by_seed,
        "lambda_max_train": lambda_max_by_seed,
        "records": records,
        "aggregates": aggregate(records),
    }

    outdir = Path(cfg.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    with open(outdir / "results.json", "w", encoding="utf-8") as fh:
        json.dump(result, fh, indent=2, sort_keys=True)
        fh.write("\n")
    _write_summary_csv(result["aggregates"], outdir / "summary.csv")
    emit_plot_data(result, outdir)
    if save_models:
        for name, ens in models.items():
            (outdir / name).write_bytes(ens.to_json_bytes() + b"\n")
    return result
