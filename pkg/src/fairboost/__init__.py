"""Fairness-aware adaptive boosting with weighted CART base learners."""

from .boost import (
    Ensemble,
    FabConfig,
    TrainingTrace,
    decision_score,
    init_weights,
    optimal_alpha,
    predict,
    reweight,
    train_adaboost,
    train_fab,
    weighted_error,
)
from .bound import BoundReport, objective_loss, verify_bound, z_product
from .dataset import Dataset, DatasetSchema, Sample, binarize_continuous_label, load_csv
from .harness import ExperimentConfig, aggregate, emit_plot_data, load_experiment_config, run_experiment
from .metrics import GroupConfusion, accuracy, confusion, fairness_loss, signed_gap
from .preprocess import FairnessIndicator, LambdaRange, balance_by_group, lambda_max, split_train_test
from .tree import Internal, Leaf, TreeConfig, TreeNode, fit_tree, predict_tree

__version__ = "0.1.0"

__all__ = [
    "BoundReport",
    "Dataset",
    "DatasetSchema",
    "Ensemble",
    "ExperimentConfig",
    "FabConfig",
    "FairnessIndicator",
    "GroupConfusion",
    "Internal",
    "LambdaRange",
    "Leaf",
    "Sample",
    "TrainingTrace",
    "TreeConfig",
    "TreeNode",
    "accuracy",
    "aggregate",
    "balance_by_group",
    "binarize_continuous_label",
    "confusion",
    "decision_score",
    "emit_plot_data",
    "fairness_loss",
    "fit_tree",
    "init_weights",
    "lambda_max",
    "load_csv",
    "load_experiment_config",
    "objective_loss",
    "optimal_alpha",
    "predict",
    "predict_tree",
    "reweight",
    "run_experiment",
    "signed_gap",
    "split_train_test",
    "train_adaboost",
    "train_fab",
    "verify_bound",
    "weighted_error",
    "z_product",
]
