"""Accuracy, per-group confusion counts, and between-group fairness losses.

All rates are plain empirical frequencies over the evaluation set; there is
no smoothing.  The sign convention for gaps is unfavored minus favored, so a
positive gap means the favored group is treated better.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import Dataset
from .errors import ContractError, UndefinedRateError
from .preprocess import FairnessIndicator


@dataclass(frozen=True)
class ConfusionCounts:
    """Confusion counts for one sensitive group (positive class is +1)."""

    true_pos: int
    false_pos: int
    true_neg: int
    false_neg: int

    @property
    def total(self) -> int:
        return self.true_pos + self.false_pos + self.true_neg + self.false_neg


@dataclass(frozen=True)
class GroupConfusion:
    """Per-group confusion counts; the eight cells sum to the sample count."""

    unfavored: ConfusionCounts
    favored: ConfusionCounts

    def group(self, g: int) -> ConfusionCounts:
        return self.favored if g == 1 else self.unfavored

    def error_rate(self, g: int, indicator: FairnessIndicator) -> float:
        """Empirical error rate of group ``g`` for the indicator's subpopulation.

        ACCURACY: misclassification rate over the whole group.
        FPR: errors among y=-1 (false positives / negatives count).
        FNR: errors among y=+1 (false negatives / positives count).
        """
        c = self.group(g)
        if indicator is FairnessIndicator.FPR:
            num, den = c.false_pos, c.false_pos + c.true_neg
        elif indicator is FairnessIndicator.FNR:
            num, den = c.false_neg, c.false_neg + c.true_pos
        else:
            num, den = c.false_pos + c.false_neg, c.total
        if den == 0:
            raise UndefinedRateError(
                f"group S={g} has no samples in the {indicator.value} denominator"
            )
        return num / den


def _check_pred(pred, n: int) -> np.ndarray:
    pred = np.asarray(pred)
    if pred.shape != (n,):
        raise ContractError(f"predictions have shape {pred.shape}, expected ({n},)")
    if not np.all(np.abs(pred) == 1):
        raise ContractError("predictions must be -1 or +1")
    return pred.astype(np.int64)


def confusion(pred, ds: Dataset) -> GroupConfusion:
    """Exact confusion counts split by sensitive group."""
    pred = _check_pred(pred, ds.n)
    s = ds.sensitive
    counts = []
    for g in (0, 1):
        in_g = s == g
        pos = ds.y == 1
        counts.append(
            ConfusionCounts(
                true_pos=int((in_g & pos & (pred == 1)).sum()),
                false_pos=int((in_g & ~pos & (pred == 1)).sum()),
                true_neg=int((in_g & ~pos & (pred == -1)).sum()),
                false_neg=int((in_g & pos & (pred == -1)).sum()),
            )
        )
    return GroupConfusion(unfavored=counts[0], favored=counts[1])


def accuracy(pred, labels) -> float:
    """Exact-match rate between predictions and labels."""
    labels = np.asarray(labels)
    pred = _check_pred(pred, labels.shape[0])
    return float(np.mean(pred == labels))


def signed_gap(pred, ds: Dataset, indicator: FairnessIndicator) -> float:
    """Unfavored-minus-favored difference of the indicator's error rate.

    Positive when the favored group has the lower error rate.  Lies in
    [-1, 1]; its absolute value is :func:`fairness_loss`.
    """
    conf = confusion(pred, ds)
    return conf.error_rate(0, indicator) - conf.error_rate(1, indicator)


def fairness_loss(pred, ds: Dataset, indicator: FairnessIndicator) -> float:
    """Absolute between-group gap of the indicator's error rate, in [0, 1]."""
    return abs(signed_gap(pred, ds, indicator))
