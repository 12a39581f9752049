"""Group balancing, train/test splitting, and the admissible trade-off range.

All randomness goes through numpy's PCG64 generator with an explicit integer
seed, so identical seeds reproduce identical subsets on every platform.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .dataset import Dataset
from .errors import (
    BalanceInfeasibleError,
    ContractError,
    DegenerateRangeError,
    MissingGroupError,
    ResampleNeededError,
)


class FairnessIndicator(str, Enum):
    """Which between-group rate the fairness loss compares.

    ACCURACY compares per-group error rates over all samples, FPR compares
    error rates within the y=-1 subpopulation, FNR within y=+1.
    """

    ACCURACY = "accuracy"
    FPR = "fpr"
    FNR = "fnr"

    @property
    def label_restriction(self) -> int | None:
        """Label value the indicator conditions on, or None for all samples."""
        if self is FairnessIndicator.FPR:
            return -1
        if self is FairnessIndicator.FNR:
            return 1
        return None


@dataclass(frozen=True)
class LambdaRange:
    """Closed admissible interval [lo, hi] for the trade-off weight."""

    lo: float
    hi: float

    def contains(self, lam: float) -> bool:
        return self.lo <= lam <= self.hi


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def balance_by_group(ds: Dataset, also_balance_labels: bool = False, seed: int = 0) -> Dataset:
    """Equalize sensitive-group counts by seeded uniform undersampling.

    With ``also_balance_labels`` every (group, label) cell is undersampled to
    the smallest cell size, so all four cells end up equal.  Never duplicates
    a sample; output keeps the original row order.
    """
    s = ds.sensitive
    if also_balance_labels:
        cells = [
            np.flatnonzero((s == g) & (ds.y == lab))
            for g in (0, 1)
            for lab in (-1, 1)
        ]
        if any(len(c) == 0 for c in cells):
            sizes = [len(c) for c in cells]
            raise BalanceInfeasibleError(
                f"(group, label) cell sizes {sizes} contain an empty cell"
            )
        target = min(len(c) for c in cells)
    else:
        cells = [np.flatnonzero(s == g) for g in (0, 1)]
        target = min(len(c) for c in cells)

    rng = _rng(seed)
    kept: list[np.ndarray] = []
    for cell in cells:
        if len(cell) == target:
            kept.append(cell)
        else:
            kept.append(rng.choice(cell, size=target, replace=False))
    indices = np.sort(np.concatenate(kept))
    return ds.subset(indices)


def split_train_test(ds: Dataset, train_fraction: float, seed: int) -> tuple[Dataset, Dataset]:
    """Seeded uniform shuffle followed by a prefix/suffix split.

    Train size is floor(train_fraction * n).  Raises
    :class:`ResampleNeededError` when either partition loses a sensitive
    group; the caller is expected to retry with a different seed.
    """
    if not 0.0 < train_fraction < 1.0:
        raise ContractError(f"train_fraction must lie in (0, 1), got {train_fraction}")
    if ds.n < 2:
        raise ContractError("need at least 2 samples to split")
    cut = int(np.floor(train_fraction * ds.n))
    if cut == 0 or cut == ds.n:
        raise ContractError(
            f"train_fraction {train_fraction} yields an empty partition for n={ds.n}"
        )
    perm = _rng(seed).permutation(ds.n)
    try:
        train = ds.subset(perm[:cut])
        test = ds.subset(perm[cut:])
    except MissingGroupError as exc:
        raise ResampleNeededError(f"seed {seed}: {exc}") from exc
    return train, test


def lambda_max(ds: Dataset, indicator: FairnessIndicator) -> LambdaRange:
    """Largest admissible trade-off weight for ``ds`` under ``indicator``.

    The upper end equals the favored-group fraction of the subpopulation the
    indicator conditions on: count(S=1)/n for ACCURACY, count(S=1, y=-1)/n
    for FPR, count(S=1, y=+1)/n for FNR.  Both groups must be represented in
    that subpopulation, otherwise the per-group rates (and the initial
    weights) are undefined.
    """
    s = ds.sensitive
    restriction = indicator.label_restriction
    if restriction is None:
        favored = int((s == 1).sum())
    else:
        in_pop = ds.y == restriction
        unfavored = int(((s == 0) & in_pop).sum())
        favored = int(((s == 1) & in_pop).sum())
        if favored == 0 or unfavored == 0:
            side = "favored" if favored == 0 else "unfavored"
            raise DegenerateRangeError(
                f"{indicator.value}: no {side}-group samples with label {restriction}"
            )
    return LambdaRange(0.0, favored / ds.n)
