"""Synthetic datasets with a controlled between-group disparity.

Used where restricted real data cannot be shipped: the generator injects a
false-negative-rate gap by making positives of the unfavored group much
harder to separate than positives of the favored group, while negatives look
alike in both groups.  It also provides small random datasets for property
tests.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .dataset import Dataset, DatasetSchema

SCHEMA = DatasetSchema(
    label_column="outcome",
    positive_label_value="yes",
    sensitive_column="group",
    favored_value="B",
    categorical_columns=("segment",),
    drop_columns=(),
)

_SEGMENTS = ("u", "v", "w")


def _draw(n: int, seed: int, disparity: float):
    rng = np.random.Generator(np.random.PCG64(seed))
    s = rng.integers(0, 2, size=n)
    y = np.where(rng.random(n) < 0.5, 1, -1)

    # Separation feature: favored positives sit at +1.2, unfavored positives
    # are pulled toward the negatives by `disparity`.
    center = np.where((y == 1) & (s == 0), 1.2 - disparity, 1.2 * y)
    x_sep = center + rng.normal(0.0, 1.0, size=n)
    x_weak = 0.8 * y + rng.normal(0.0, 1.5, size=n)
    x_noise = rng.normal(0.0, 1.0, size=n)
    segment = rng.integers(0, len(_SEGMENTS), size=n)
    return s, y, x_sep, x_weak, x_noise, segment


def make_disparity_dataset(n: int = 2000, seed: int = 0, disparity: float = 1.4) -> Dataset:
    """In-memory dataset with an injected FNR gap against group S=0."""
    s, y, x_sep, x_weak, x_noise, segment = _draw(n, seed, disparity)
    X = np.column_stack([x_sep, x_weak, x_noise, segment.astype(np.float64), s.astype(np.float64)])
    return Dataset(
        X=X,
        y=y,
        feature_names=("score_a", "score_b", "noise", "segment", "group"),
        sensitive_index=4,
        schema_fingerprint=f"synthetic-disparity-n{n}-seed{seed}-d{disparity}",
        categories={"segment": _SEGMENTS},
    )


def write_disparity_csv(path: str | Path, n: int = 2000, seed: int = 0, disparity: float = 1.4) -> None:
    """CSV twin of :func:`make_disparity_dataset` for the experiment pipeline.

    Text-valued label, group, and segment columns exercise the full schema
    encoding path; loading with :data:`SCHEMA` reproduces the same dataset.
    """
    s, y, x_sep, x_weak, x_noise, segment = _draw(n, seed, disparity)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["score_a", "score_b", "noise", "segment", "group", "outcome"])
        for i in range(n):
            writer.writerow(
                [
                    repr(float(x_sep[i])),
                    repr(float(x_weak[i])),
                    repr(float(x_noise[i])),
                    _SEGMENTS[segment[i]],
                    "B" if s[i] == 1 else "A",
                    "yes" if y[i] == 1 else "no",
                ]
            )


def random_dataset(n: int = 40, seed: int = 0, n_features: int = 3, noise: float = 0.25) -> Dataset:
    """Small random dataset for property tests; labels are noisy but learnable."""
    rng = np.random.Generator(np.random.PCG64(seed))
    if n < 4:
        raise ValueError("need at least 4 samples")
    X = rng.normal(0.0, 1.0, size=(n, n_features))
    s = np.zeros(n, dtype=np.int64)
    s[rng.permutation(n)[: n // 2]] = 1
    direction = rng.normal(0.0, 1.0, size=n_features)
    y = np.where(X @ direction + rng.normal(0.0, noise * np.linalg.norm(direction), n) > 0, 1, -1)
    if np.all(y == y[0]):
        y[0] = -y[0]
    X = np.column_stack([X, s.astype(np.float64)])
    return Dataset(
        X=X,
        y=y,
        feature_names=tuple(f"f{j}" for j in range(n_features)) + ("group",),
        sensitive_index=n_features,
        schema_fingerprint=f"synthetic-random-n{n}-seed{seed}",
    )
