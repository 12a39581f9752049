"""CSV-backed tabular datasets with explicit label and sensitive-attribute encodings.

A dataset is loaded once from an RFC-4180 CSV file (header row, UTF-8) under a
declarative schema and is immutable afterwards.  Labels live in {-1, +1},
the sensitive attribute in {0, 1} with 1 denoting the favored group.  The
sensitive attribute stays inside the feature matrix at a recorded index so
that fairness metrics can read it; excluding it from model fitting is the
trainer's job, not the loader's.
"""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    CardinalityError,
    ContractError,
    DegenerateLabelError,
    EmptyDatasetError,
    MissingGroupError,
    SchemaError,
)

#: Cell values (after whitespace stripping) treated as missing.
MISSING_TOKENS = frozenset({"", "?", "NA"})


@dataclass(frozen=True)
class Sample:
    """One row: feature vector (sensitive attribute included), label, group."""

    features: np.ndarray
    label: int
    sensitive: int


@dataclass(frozen=True)
class DatasetSchema:
    """Declarative description of how to read one CSV file.

    ``favored_value`` is the raw sensitive-column value mapped to group 1;
    every other (single) value maps to group 0.  Categorical columns are
    integer-encoded by first appearance in file order.  The label and
    sensitive columns carry their own encodings and must not be listed as
    categorical.
    """

    label_column: str
    positive_label_value: str
    sensitive_column: str
    favored_value: str
    categorical_columns: tuple[str, ...] = ()
    drop_columns: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "categorical_columns", tuple(self.categorical_columns))
        object.__setattr__(self, "drop_columns", tuple(self.drop_columns))
        if self.label_column == self.sensitive_column:
            raise SchemaError("label_column and sensitive_column must differ")
        for col in (self.label_column, self.sensitive_column):
            if col in self.drop_columns:
                raise SchemaError(f"column {col!r} cannot be dropped")
            if col in self.categorical_columns:
                raise SchemaError(
                    f"column {col!r} has a dedicated encoding and cannot be categorical"
                )

    def to_dict(self) -> dict:
        return {
            "label_column": self.label_column,
            "positive_label_value": self.positive_label_value,
            "sensitive_column": self.sensitive_column,
            "favored_value": self.favored_value,
            "categorical_columns": list(self.categorical_columns),
            "drop_columns": list(self.drop_columns),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DatasetSchema":
        try:
            return cls(
                label_column=d["label_column"],
                positive_label_value=str(d["positive_label_value"]),
                sensitive_column=d["sensitive_column"],
                favored_value=str(d["favored_value"]),
                categorical_columns=tuple(d.get("categorical_columns", ())),
                drop_columns=tuple(d.get("drop_columns", ())),
            )
        except KeyError as exc:
            raise SchemaError(f"schema document is missing field {exc}") from exc

    @classmethod
    def from_json_file(cls, path: str | Path) -> "DatasetSchema":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


@dataclass(frozen=True)
class Dataset:
    """Immutable in-memory dataset.

    ``X`` is an (n, d) float matrix with the encoded sensitive attribute at
    column ``sensitive_index``; ``y`` holds labels in {-1, +1}.
    ``categories`` maps each categorical column to its value list, where the
    list index is the integer code (supports decoding).
    """

    X: np.ndarray
    y: np.ndarray
    feature_names: tuple[str, ...]
    sensitive_index: int
    schema_fingerprint: str
    categories: dict = field(default_factory=dict)

    def __post_init__(self):
        X = np.ascontiguousarray(np.asarray(self.X, dtype=np.float64))
        y = np.asarray(self.y, dtype=np.int64)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "feature_names", tuple(self.feature_names))
        if X.ndim != 2:
            raise ContractError("feature matrix must be 2-dimensional")
        if X.shape[0] == 0:
            raise EmptyDatasetError("dataset has no rows")
        if y.shape != (X.shape[0],):
            raise ContractError("labels must align with feature rows")
        if X.shape[1] != len(self.feature_names):
            raise ContractError("feature_names must match feature arity")
        if not (0 <= self.sensitive_index < X.shape[1]):
            raise ContractError("sensitive_index out of range")
        if not np.all(np.abs(y) == 1):
            raise ContractError("labels must be -1 or +1")
        s = X[:, self.sensitive_index]
        if not np.all((s == 0.0) | (s == 1.0)):
            raise ContractError("sensitive column must be encoded as 0/1")
        if not (s == 0.0).any():
            raise MissingGroupError("sensitive group S=0 is empty")
        if not (s == 1.0).any():
            raise MissingGroupError("sensitive group S=1 is empty")
        X.setflags(write=False)
        y.setflags(write=False)

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def n_features(self) -> int:
        return self.X.shape[1]

    @property
    def sensitive(self) -> np.ndarray:
        """Group membership per row as an int array in {0, 1}."""
        return self.X[:, self.sensitive_index].astype(np.int64)

    def group_counts(self) -> tuple[int, int]:
        s = self.sensitive
        return int((s == 0).sum()), int((s == 1).sum())

    @property
    def samples(self) -> list[Sample]:
        s = self.sensitive
        return [Sample(self.X[i], int(self.y[i]), int(s[i])) for i in range(self.n)]

    def subset(self, indices) -> "Dataset":
        idx = np.asarray(indices, dtype=np.int64)
        return Dataset(
            X=self.X[idx],
            y=self.y[idx],
            feature_names=self.feature_names,
            sensitive_index=self.sensitive_index,
            schema_fingerprint=self.schema_fingerprint,
            categories=self.categories,
        )

    def decode_value(self, column: str, code: float) -> str:
        """Inverse of the ordinal encoding for one categorical cell."""
        values = self.categories[column]
        return values[int(code)]


def _fingerprint(schema: DatasetSchema, feature_names, categories) -> str:
    doc = {
        "schema": schema.to_dict(),
        "feature_names": list(feature_names),
        "categories": {k: list(v) for k, v in categories.items()},
    }
    blob = json.dumps(doc, sort_keys=True).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()


def load_csv(path: str | Path, schema: DatasetSchema, on_missing: str = "drop_row") -> Dataset:
    """Load a CSV file under ``schema`` into a validated :class:`Dataset`.

    Cells are whitespace-stripped before interpretation; a stripped cell in
    :data:`MISSING_TOKENS` counts as missing and the row is dropped or the
    load aborts according to ``on_missing`` ("drop_row" or "error").
    Rows keep file order, so loading is deterministic.
    """
    if on_missing not in ("drop_row", "error"):
        raise ContractError(f"on_missing must be 'drop_row' or 'error', got {on_missing!r}")
    path = Path(path)

    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise EmptyDatasetError(f"{path} is empty") from None

        required = {schema.label_column, schema.sensitive_column}
        required.update(schema.categorical_columns)
        required.update(schema.drop_columns)
        missing_cols = sorted(required - set(header))
        if missing_cols:
            raise SchemaError(f"header is missing schema columns: {missing_cols}")

        col_index = {name: i for i, name in enumerate(header)}
        label_pos = col_index[schema.label_column]
        dropped = set(schema.drop_columns)
        feature_names = tuple(
            name for name in header if name != schema.label_column and name not in dropped
        )
        feature_pos = [col_index[name] for name in feature_names]
        sensitive_index = feature_names.index(schema.sensitive_column)
        categorical = set(schema.categorical_columns)

        codes: dict[str, dict[str, int]] = {c: {} for c in categorical}
        sensitive_values: dict[str, int] = {}
        negative_label: str | None = None
        rows: list[list[float]] = []
        labels: list[int] = []
        keep_positions = feature_pos + [label_pos]

        for line_no, raw in enumerate(reader, start=2):
            if len(raw) != len(header):
                raise SchemaError(f"{path}:{line_no}: expected {len(header)} cells, got {len(raw)}")
            cells = [c.strip() for c in raw]
            if any(cells[p] in MISSING_TOKENS for p in keep_positions):
                if on_missing == "drop_row":
                    continue
                raise SchemaError(f"{path}:{line_no}: missing value")

            label_raw = cells[label_pos]
            if label_raw == schema.positive_label_value:
                labels.append(1)
            else:
                labels.append(-1)
                if negative_label is None:
                    negative_label = label_raw

            vec = []
            for name, p in zip(feature_names, feature_pos):
                cell = cells[p]
                if name == schema.sensitive_column:
                    if cell == schema.favored_value:
                        value = 1.0
                    else:
                        sensitive_values.setdefault(cell, len(sensitive_values))
                        value = 0.0
                    if len(sensitive_values) > 1:
                        seen = sorted(sensitive_values) + [schema.favored_value]
                        raise CardinalityError(
                            f"sensitive column {name!r} has more than 2 values: {seen}"
                        )
                elif name in categorical:
                    value = float(codes[name].setdefault(cell, len(codes[name])))
                else:
                    try:
                        value = float(cell)
                    except ValueError:
                        raise SchemaError(
                            f"{path}:{line_no}: non-numeric value {cell!r} in column {name!r}"
                        ) from None
                vec.append(value)
            rows.append(vec)

    if not rows:
        raise EmptyDatasetError(f"no rows remain after loading {path}")

    categories = {
        name: tuple(sorted(mapping, key=mapping.get)) for name, mapping in codes.items()
    }
    # Remember raw spellings of the two special columns so write_csv can
    # decode them; index doubles as the encoded value.
    unfavored = next(iter(sensitive_values), "0")
    categories[schema.sensitive_column] = (unfavored, schema.favored_value)
    categories[schema.label_column] = (
        negative_label if negative_label is not None else "-1",
        schema.positive_label_value,
    )
    return Dataset(
        X=np.array(rows, dtype=np.float64),
        y=np.array(labels, dtype=np.int64),
        feature_names=feature_names,
        sensitive_index=sensitive_index,
        schema_fingerprint=_fingerprint(schema, feature_names, categories),
        categories=categories,
    )


def write_csv(ds: Dataset, path: str | Path, schema: DatasetSchema) -> None:
    """Write ``ds`` back to CSV with encoded columns decoded to text values.

    The output reloads to an equal dataset under the same schema.  Distinct
    negative label spellings collapse to the first one seen at load time.
    """
    header = list(ds.feature_names) + [schema.label_column]
    s = ds.sensitive
    label_values = ds.categories.get(schema.label_column, ("-1", schema.positive_label_value))
    sens_values = ds.categories.get(schema.sensitive_column, ("0", schema.favored_value))
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for i in range(ds.n):
            row = []
            for j, name in enumerate(ds.feature_names):
                if j == ds.sensitive_index:
                    row.append(sens_values[int(s[i])])
                elif name in ds.categories:
                    row.append(ds.decode_value(name, ds.X[i, j]))
                else:
                    row.append(repr(float(ds.X[i, j])))
            row.append(label_values[(ds.y[i] + 1) // 2])
            writer.writerow(row)


def binarize_continuous_label(raw, rule="median") -> np.ndarray:
    """Map a continuous score vector to {-1, +1} labels.

    ``rule`` is either the string "median" (threshold at the sample median)
    or an explicit numeric threshold.  Values strictly above the threshold
    become +1, everything else -1.
    """
    values = np.asarray(raw, dtype=np.float64)
    if values.size == 0:
        raise ContractError("cannot binarize an empty vector")
    if np.all(values == values[0]):
        raise DegenerateLabelError("all label values are identical")
    if isinstance(rule, str):
        if rule != "median":
            raise ContractError(f"unknown threshold rule {rule!r}")
        threshold = float(np.median(values))
    else:
        threshold = float(rule)
    return np.where(values > threshold, 1, -1).astype(np.int64)
