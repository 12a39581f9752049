"""Fairness-aware adaptive boosting.

The trainer is classical discrete AdaBoost except for its initial sample
distribution: a trade-off weight ``lam`` moves probability mass from the
favored group to the unfavored group (within the label slice the fairness
indicator conditions on), so the exponential-loss machinery then bounds a
fairness-penalized objective instead of the plain error rate.  ``lam = 0``
recovers vanilla AdaBoost exactly.

Per round t the trainer records the weighted error e_t, the learner weight
alpha_t = 0.5*ln((1-e_t)/e_t), and the normalization factor Z_t of the
weight update.  The telescoping identity

    sum_i D_1(x_i) * exp(-y_i * sum_t alpha_t h_t(x_i)) = prod_t Z_t

is self-checked after every training run.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .dataset import Dataset
from .errors import ContractError, LambdaRangeError, NumericError
from .preprocess import FairnessIndicator, lambda_max
from .tree import (
    TreeConfig,
    TreeNode,
    check_simplex,
    fit_tree,
    predict_tree,
    predict_tree_batch,
    tree_from_dict,
    tree_to_dict,
)

TELESCOPE_RTOL = 1e-6


@dataclass(frozen=True)
class FabConfig:
    """Training hyperparameters; ``rounds`` is the ensemble size T.

    With ``clamp_lambda`` a requested ``lam`` above the admissible maximum is
    saturated to that maximum instead of rejected; the ensemble records both
    the requested and the effective value.
    """

    rounds: int
    lam: float
    indicator: FairnessIndicator
    tree: TreeConfig = TreeConfig()
    epsilon: float = 1e-12
    clamp_lambda: bool = False

    def __post_init__(self):
        if self.rounds < 1:
            raise ContractError("rounds must be >= 1")
        if self.lam < 0:
            raise LambdaRangeError("lam must be >= 0")
        if not 0.0 < self.epsilon < 0.5:
            raise ContractError("epsilon must lie in (0, 0.5)")


@dataclass
class TrainingTrace:
    """Per-round record: weighted error, learner weight, normalization factor.

    ``weight_hash[t]`` fingerprints the sample distribution the round trained
    on.  ``weights`` holds the raw distributions D_1 .. D_{T+1} only when the
    trainer was asked to collect them.
    """

    e: list[float] = field(default_factory=list)
    alpha: list[float] = field(default_factory=list)
    z: list[float] = field(default_factory=list)
    weight_hash: list[str] = field(default_factory=list)
    weights: list[np.ndarray] | None = None

    def to_dict(self) -> dict:
        return {
            "e": self.e,
            "alpha": self.alpha,
            "z": self.z,
            "weight_hash": self.weight_hash,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "TrainingTrace":
        return cls(
            e=[float(v) for v in doc["e"]],
            alpha=[float(v) for v in doc["alpha"]],
            z=[float(v) for v in doc["z"]],
            weight_hash=[str(v) for v in doc["weight_hash"]],
        )


@dataclass
class Ensemble:
    """Ordered (tree, alpha) members plus training metadata."""

    members: list[tuple[TreeNode, float]]
    indicator: FairnessIndicator
    lam: float
    lam_effective: float
    trace: TrainingTrace
    n_features: int

    def __post_init__(self):
        if not self.members:
            raise ContractError("ensemble must have at least one member")
        if not all(math.isfinite(alpha) for _, alpha in self.members):
            raise ContractError("member weights must be finite")

    def decision_scores(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.n_features:
            raise ContractError(f"expected (n, {self.n_features}) inputs, got {X.shape}")
        scores = np.zeros(X.shape[0], dtype=np.float64)
        for tree, alpha in self.members:
            scores += alpha * predict_tree_batch(tree, X)
        return scores

    def predict_batch(self, X: np.ndarray) -> np.ndarray:
        return np.where(self.decision_scores(X) >= 0.0, 1, -1).astype(np.int64)

    def to_dict(self) -> dict:
        return {
            "indicator": self.indicator.value,
            "lambda": self.lam,
            "lambda_effective": self.lam_effective,
            "T": len(self.members),
            "n_features": self.n_features,
            "members": [
                {"alpha": alpha, "tree": tree_to_dict(tree)} for tree, alpha in self.members
            ],
            "trace": self.trace.to_dict(),
        }

    def to_json_bytes(self) -> bytes:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":")).encode("utf-8")

    @classmethod
    def from_dict(cls, doc: dict) -> "Ensemble":
        return cls(
            members=[(tree_from_dict(m["tree"]), float(m["alpha"])) for m in doc["members"]],
            indicator=FairnessIndicator(doc["indicator"]),
            lam=float(doc["lambda"]),
            lam_effective=float(doc["lambda_effective"]),
            trace=TrainingTrace.from_dict(doc["trace"]),
            n_features=int(doc["n_features"]),
        )


def decision_score(ens: Ensemble, x) -> float:
    """Weighted vote sum_t alpha_t * h_t(x) for one input."""
    return float(sum(alpha * predict_tree(tree, x) for tree, alpha in ens.members))


def predict(ens: Ensemble, x) -> int:
    """Sign of the decision score; a zero score predicts +1."""
    return 1 if decision_score(ens, x) >= 0.0 else -1


def init_weights(ds: Dataset, indicator: FairnessIndicator, lam: float) -> np.ndarray:
    """Initial sample distribution D_1 for the given indicator and trade-off.

    Within the indicator's label slice, unfavored samples get
    1/n + lam/count(unfavored slice) and favored samples get
    1/n - lam/count(favored slice); everything else stays at 1/n.  The
    favored-side weight is computed so it is exactly zero at the admissible
    maximum.  The result sums to 1 by construction.
    """
    admissible = lambda_max(ds, indicator)
    if not admissible.contains(lam):
        raise LambdaRangeError(
            f"lam={lam} outside admissible range [0, {admissible.hi}] "
            f"for indicator {indicator.value}"
        )
    s = ds.sensitive
    n = ds.n
    restriction = indicator.label_restriction
    if restriction is None:
        in_slice = np.ones(n, dtype=bool)
    else:
        in_slice = ds.y == restriction
    unfav = (s == 0) & in_slice
    fav = (s == 1) & in_slice

    w = np.full(n, 1.0 / n, dtype=np.float64)
    w[unfav] = 1.0 / n + lam / int(unfav.sum())
    w[fav] = (1.0 - lam / admissible.hi) / n
    return w


def weighted_error(tree: TreeNode, weights, ds: Dataset) -> float:
    """Total weight of the samples the tree misclassifies."""
    d = np.asarray(weights, dtype=np.float64)
    if d.shape != (ds.n,):
        raise ContractError(f"weights have shape {d.shape}, expected ({ds.n},)")
    check_simplex(d)
    h = predict_tree_batch(tree, ds.X)
    return float(d[h != ds.y].sum())


def optimal_alpha(e_t: float, epsilon: float = 1e-12) -> float:
    """Learner weight 0.5*ln((1-e)/e) with e clamped into [epsilon, 1-epsilon].

    The clamp keeps the value finite for perfect (e=0) and hopeless (e=1)
    learners; for e_t > 1/2 the result is negative, which is still the exact
    minimizer of the round's normalization factor.
    """
    if not 0.0 <= e_t <= 1.0:
        raise ContractError(f"e_t must lie in [0, 1], got {e_t}")
    eh = min(max(e_t, epsilon), 1.0 - epsilon)
    return 0.5 * math.log((1.0 - eh) / eh)


def _update_weights(d, alpha, h, y):
    factors = np.exp(-alpha * (y * h))
    unnormalized = d * factors
    z = float(unnormalized.sum())
    if not (z > 0.0 and math.isfinite(z)):
        raise NumericError(f"normalization factor is {z}")
    return unnormalized / z, z


def reweight(weights, alpha: float, tree: TreeNode, ds: Dataset):
    """One multiplicative weight update; returns (new weights, Z).

    new_i = w_i * exp(-y_i * alpha * h(x_i)) / Z with Z the normalizing sum.
    """
    d = np.asarray(weights, dtype=np.float64)
    if d.shape != (ds.n,):
        raise ContractError(f"weights have shape {d.shape}, expected ({ds.n},)")
    check_simplex(d)
    h = predict_tree_batch(tree, ds.X)
    return _update_weights(d, alpha, h, ds.y)


def _hash_weights(d: np.ndarray) -> str:
    return hashlib.sha256(np.ascontiguousarray(d).tobytes()).hexdigest()


def _check_telescoping(d1: np.ndarray, y: np.ndarray, score: np.ndarray, zs: list[float]) -> None:
    """Verify sum_i D_1 exp(-y_i score_i) = prod_t Z_t to relative tolerance.

    Compared in log space so that runs with near-zero errors (huge alphas)
    cannot overflow.
    """
    mask = d1 > 0.0
    expo = -(y[mask].astype(np.float64)) * score[mask]
    m = float(expo.max())
    lhs_log = m + math.log(float(np.sum(d1[mask] * np.exp(expo - m))))
    rhs_log = float(np.sum(np.log(zs)))
    if abs(lhs_log - rhs_log) > TELESCOPE_RTOL:
        raise NumericError(
            f"telescoping identity violated: log lhs={lhs_log}, log rhs={rhs_log}"
        )


def train_fab(train: Dataset, cfg: FabConfig, collect_weights: bool = False) -> Ensemble:
    """Train a fairness-aware ensemble of ``cfg.rounds`` trees on ``train``.

    The sensitive feature is excluded from every tree's split search.  Exactly
    ``cfg.rounds`` rounds are run; rounds with weighted error 0 or 1 are kept,
    with alpha clamped through ``cfg.epsilon``.
    """
    admissible = lambda_max(train, cfg.indicator)
    lam_eff = min(cfg.lam, admissible.hi) if cfg.clamp_lambda else cfg.lam
    d = init_weights(train, cfg.indicator, lam_eff)
    d1 = d.copy()

    y = train.y
    trace = TrainingTrace(weights=[d1.copy()] if collect_weights else None)
    members: list[tuple[TreeNode, float]] = []
    score = np.zeros(train.n, dtype=np.float64)

    for _ in range(cfg.rounds):
        tree = fit_tree(train, d, cfg.tree)
        h = predict_tree_batch(tree, train.X)
        e = float(d[h != y].sum())
        eh = min(max(e, cfg.epsilon), 1.0 - cfg.epsilon)
        alpha = 0.5 * math.log((1.0 - eh) / eh)
        trace.weight_hash.append(_hash_weights(d))
        d, z = _update_weights(d, alpha, h, y)
        trace.e.append(e)
        trace.alpha.append(alpha)
        trace.z.append(z)
        if collect_weights:
            trace.weights.append(d.copy())
        members.append((tree, alpha))
        score += alpha * h

    _check_telescoping(d1, y, score, trace.z)
    return Ensemble(
        members=members,
        indicator=cfg.indicator,
        lam=cfg.lam,
        lam_effective=lam_eff,
        trace=trace,
        n_features=train.n_features,
    )


def train_adaboost(
    train: Dataset,
    rounds: int,
    tree_cfg: TreeConfig = TreeConfig(),
    epsilon: float = 1e-12,
    indicator: FairnessIndicator = FairnessIndicator.ACCURACY,
    collect_weights: bool = False,
) -> Ensemble:
    """Reference vanilla AdaBoost: uniform initial weights, same update rule.

    Kept as an independent code path (not a train_fab call) so the lam=0
    equivalence of the fairness-aware trainer can be checked against it.
    """
    if rounds < 1:
        raise ContractError("rounds must be >= 1")
    n = train.n
    y = train.y
    d = np.full(n, 1.0 / n, dtype=np.float64)
    d1 = d.copy()

    trace = TrainingTrace(weights=[d1.copy()] if collect_weights else None)
    members: list[tuple[TreeNode, float]] = []
    score = np.zeros(n, dtype=np.float64)

    for _ in range(rounds):
        tree = fit_tree(train, d, tree_cfg)
        h = predict_tree_batch(tree, train.X)
        e = float(d[h != y].sum())
        eh = min(max(e, epsilon), 1.0 - epsilon)
        alpha = 0.5 * math.log((1.0 - eh) / eh)
        trace.weight_hash.append(_hash_weights(d))
        d, z = _update_weights(d, alpha, h, y)
        trace.e.append(e)
        trace.alpha.append(alpha)
        trace.z.append(z)
        if collect_weights:
            trace.weights.append(d.copy())
        members.append((tree, alpha))
        score += alpha * h

    _check_telescoping(d1, y, score, trace.z)
    return Ensemble(
        members=members,
        indicator=indicator,
        lam=0.0,
        lam_effective=0.0,
        trace=trace,
        n_features=train.n_features,
    )
