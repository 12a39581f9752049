"""Weighted binary CART trees used as base learners.

Split search minimizes weighted Gini impurity over midpoint thresholds of
every non-sensitive feature.  Ties break toward the lowest feature index,
then the lowest threshold, which makes fitting fully deterministic.
Routing convention: x[feature] <= threshold goes left.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import Dataset
from .errors import ContractError

SIMPLEX_TOL = 1e-9


@dataclass(frozen=True)
class Leaf:
    """Terminal node: prediction is the sign of the weighted label margin.

    ``weighted_margin`` is (weighted +1 mass) - (weighted -1 mass) of the
    training samples routed here; a zero margin predicts +1.
    """

    prediction: int
    weighted_margin: float


@dataclass(frozen=True)
class Internal:
    feature_index: int
    threshold: float
    left: "TreeNode"
    right: "TreeNode"


TreeNode = Leaf | Internal


@dataclass(frozen=True)
class TreeConfig:
    max_depth: int = 3
    min_leaf_weight: float = 0.0

    def __post_init__(self):
        if self.max_depth < 1:
            raise ContractError("max_depth must be >= 1")
        if self.min_leaf_weight < 0:
            raise ContractError("min_leaf_weight must be >= 0")


def check_simplex(w: np.ndarray, tol: float = SIMPLEX_TOL) -> None:
    """Raise unless ``w`` is a probability vector within ``tol``."""
    if w.ndim != 1:
        raise ContractError("weights must be a 1-d vector")
    if w.size and float(w.min()) < -tol:
        raise ContractError(f"weights contain a negative entry: {w.min()}")
    total = float(w.sum())
    if abs(total - 1.0) > tol:
        raise ContractError(f"weights sum to {total}, expected 1")


def _best_split(values: np.ndarray, w: np.ndarray, is_pos: np.ndarray, min_leaf_weight: float):
    """Best (reduction, threshold) for one feature, or None.

    Candidates are midpoints between consecutive distinct sorted values.
    Sides with weighted mass below ``min_leaf_weight`` are inadmissible.
    Among equal reductions the lowest threshold wins.
    """
    order = np.argsort(values, kind="stable")
    vs = values[order]
    ws = w[order]
    ps = np.where(is_pos[order], ws, 0.0)

    distinct = vs[:-1] < vs[1:]
    if not distinct.any():
        return None

    cw = np.cumsum(ws)
    cp = np.cumsum(ps)
    w_total = cw[-1]
    p_total = cp[-1]

    wl = cw[:-1][distinct]
    pl = cp[:-1][distinct]
    wr = w_total - wl
    pr = p_total - pl

    with np.errstate(divide="ignore", invalid="ignore"):
        gini_left = np.where(wl > 0, 2.0 * pl * (wl - pl) / wl, 0.0)
        gini_right = np.where(wr > 0, 2.0 * pr * (wr - pr) / wr, 0.0)
    node_gini = 2.0 * p_total * (w_total - p_total) / w_total if w_total > 0 else 0.0
    reduction = node_gini - (gini_left + gini_right)

    admissible = (wl >= min_leaf_weight) & (wr >= min_leaf_weight)
    if not admissible.any():
        return None
    reduction = np.where(admissible, reduction, -np.inf)

    best = int(np.argmax(reduction))  # first max = lowest threshold
    thresholds = (vs[:-1][distinct] + vs[1:][distinct]) / 2.0
    return float(reduction[best]), float(thresholds[best])


def fit_tree(ds: Dataset, weights, cfg: TreeConfig = TreeConfig()) -> TreeNode:
    """Grow a depth-limited weighted CART tree on ``ds``.

    The sensitive feature never enters the split search.  Growth stops at
    ``max_depth``, on pure nodes, or when no admissible split strictly
    reduces weighted Gini impurity.  Zero-weight samples are routed but do
    not influence impurity or leaf votes.
    """
    w = np.asarray(weights, dtype=np.float64)
    if w.shape != (ds.n,):
        raise ContractError(f"weights have shape {w.shape}, expected ({ds.n},)")
    check_simplex(w)

    X = ds.X
    is_pos = ds.y == 1
    features = [j for j in range(ds.n_features) if j != ds.sensitive_index]

    def grow(indices: np.ndarray, depth: int) -> TreeNode:
        wn = w[indices]
        pos_mass = float(wn[is_pos[indices]].sum())
        neg_mass = float(wn[~is_pos[indices]].sum())
        margin = pos_mass - neg_mass
        prediction = 1 if margin >= 0 else -1
        if depth >= cfg.max_depth or pos_mass == 0.0 or neg_mass == 0.0:
            return Leaf(prediction, margin)

        best_reduction = 0.0
        best_feature = -1
        best_threshold = 0.0
        for j in features:
            found = _best_split(X[indices, j], wn, is_pos[indices], cfg.min_leaf_weight)
            if found is None:
                continue
            reduction, threshold = found
            if reduction > best_reduction:
                best_reduction = reduction
                best_feature = j
                best_threshold = threshold

        if best_feature < 0 or best_reduction <= 0.0:
            return Leaf(prediction, margin)
        go_left = X[indices, best_feature] <= best_threshold
        return Internal(
            feature_index=best_feature,
            threshold=best_threshold,
            left=grow(indices[go_left], depth + 1),
            right=grow(indices[~go_left], depth + 1),
        )

    return grow(np.arange(ds.n), 0)


def predict_tree(tree: TreeNode, x) -> int:
    """Route one feature vector to a leaf and return its prediction."""
    x = np.asarray(x, dtype=np.float64)
    node = tree
    while isinstance(node, Internal):
        if node.feature_index >= x.shape[0]:
            raise ContractError(
                f"input has {x.shape[0]} features, tree expects index {node.feature_index}"
            )
        node = node.left if x[node.feature_index] <= node.threshold else node.right
    return node.prediction


def predict_tree_batch(tree: TreeNode, X: np.ndarray) -> np.ndarray:
    """Vectorized :func:`predict_tree` over the rows of ``X``."""
    X = np.asarray(X, dtype=np.float64)
    out = np.empty(X.shape[0], dtype=np.int64)

    def walk(node: TreeNode, idx: np.ndarray) -> None:
        if isinstance(node, Leaf):
            out[idx] = node.prediction
            return
        if node.feature_index >= X.shape[1]:
            raise ContractError(
                f"input has {X.shape[1]} features, tree expects index {node.feature_index}"
            )
        go_left = X[idx, node.feature_index] <= node.threshold
        walk(node.left, idx[go_left])
        walk(node.right, idx[~go_left])

    walk(tree, np.arange(X.shape[0]))
    return out


def tree_depth(tree: TreeNode) -> int:
    if isinstance(tree, Leaf):
        return 0
    return 1 + max(tree_depth(tree.left), tree_depth(tree.right))


def tree_to_dict(tree: TreeNode) -> dict:
    """Nested JSON-ready representation of a tree."""
    if isinstance(tree, Leaf):
        return {
            "kind": "leaf",
            "prediction": tree.prediction,
            "weighted_margin": tree.weighted_margin,
        }
    return {
        "kind": "internal",
        "feature_index": tree.feature_index,
        "threshold": tree.threshold,
        "left": tree_to_dict(tree.left),
        "right": tree_to_dict(tree.right),
    }


def tree_from_dict(doc: dict) -> TreeNode:
    kind = doc.get("kind")
    if kind == "leaf":
        return Leaf(int(doc["prediction"]), float(doc["weighted_margin"]))
    if kind == "internal":
        return Internal(
            feature_index=int(doc["feature_index"]),
            threshold=float(doc["threshold"]),
            left=tree_from_dict(doc["left"]),
            right=tree_from_dict(doc["right"]),
        )
    raise ContractError(f"unknown tree node kind {kind!r}")
