"""CSV ingestion and deterministic train/test splitting.

Categorical columns are integer-encoded by first appearance so the number of
chromosome bits equals the number of raw columns; one-hot encoding would change
the search space. Rows with missing cells are dropped and counted.
"""

from __future__ import annotations

import csv
import hashlib
from dataclasses import dataclass

import numpy as np

MISSING_TOKENS = {"", "?", "NA", "N/A"}


class DatasetError(ValueError):
    """Raised when a file cannot be turned into a usable dataset."""


class ColumnNotFound(DatasetError):
    """Raised when a named target/sensitive column is absent from the header."""

    def __init__(self, column: str):
        super().__init__(f"column not found: {column!r}")
        self.column = column


@dataclass(frozen=True)
class Dataset:
    """Numeric classification dataset with a designated sensitive attribute.

    features is n x m with categorical columns integer-encoded; target is 0/1
    with 1 the favourable class; sensitive_groups are integer group ids derived
    from the sensitive column's raw values. The sensitive column stays inside
    the feature matrix (it is selectable like any other feature).
    """

    name: str
    feature_names: tuple[str, ...]
    features: np.ndarray
    target: np.ndarray
    sensitive_index: int
    sensitive_groups: np.ndarray
    column_kinds: tuple[str, ...]  # "numeric" | "categorical"
    dropped_count: int = 0

    def __post_init__(self):
        m = len(self.feature_names)
        if m < 2:
            raise DatasetError("need at least 2 features")
        if self.features.shape != (len(self.target), m):
            raise DatasetError("feature matrix shape mismatch")
        if not (0 <= self.sensitive_index < m):
            raise DatasetError("sensitive_index out of range")
        classes = np.unique(self.target)
        if not np.array_equal(classes, [0, 1]):
            raise DatasetError("target must contain both classes 0 and 1")
        if len(np.unique(self.sensitive_groups)) < 2:
            raise DatasetError("sensitive column must have at least 2 groups")
        for arr in (self.features, self.target, self.sensitive_groups):
            arr.setflags(write=False)

    @property
    def n_rows(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    def fingerprint(self) -> dict:
        """Stable identity of the encoded data, for run provenance."""
        h = hashlib.sha256()
        h.update("\x1f".join(self.feature_names).encode())
        h.update(np.ascontiguousarray(self.features).tobytes())
        h.update(np.ascontiguousarray(self.target).tobytes())
        h.update(np.ascontiguousarray(self.sensitive_groups).tobytes())
        return {
            "name": self.name,
            "m": self.n_features,
            "n": self.n_rows,
            "column_hash": h.hexdigest()[:16],
        }


@dataclass(frozen=True)
class Split:
    """Disjoint train/test row indices covering the whole dataset."""

    train_indices: np.ndarray
    test_indices: np.ndarray
    test_fraction: float = 0.3
    seed: int = 0

    def __post_init__(self):
        train = set(self.train_indices.tolist())
        test = set(self.test_indices.tolist())
        if train & test:
            raise ValueError("train/test indices overlap")
        self.train_indices.setflags(write=False)
        self.test_indices.setflags(write=False)


def _is_missing(cell: str) -> bool:
    return cell.strip() in MISSING_TOKENS


def _parse_numeric(values: list[str]) -> np.ndarray | None:
    try:
        return np.array([float(v) for v in values], dtype=float)
    except ValueError:
        return None


def _encode_first_appearance(values: list[str]) -> np.ndarray:
    codes: dict[str, int] = {}
    out = np.empty(len(values), dtype=float)
    for i, v in enumerate(values):
        if v not in codes:
            codes[v] = len(codes)
        out[i] = codes[v]
    return out


def load_csv(
    path,
    target_column: str,
    sensitive_column: str,
    positive_label: str,
    name: str | None = None,
) -> Dataset:
    """Load a CSV classification dataset.

    The header row names columns; rows with any missing cell ("" , "?", "NA",
    "N/A") are dropped and counted in Dataset.dropped_count. The target column
    must take exactly two distinct values and is mapped to {0,1} via
    positive_label. All other columns become features.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DatasetError(f"empty file: {path}") from None
        header = [h.strip() for h in header]
        rows = [row for row in reader if row]

    if target_column not in header:
        raise ColumnNotFound(target_column)
    if sensitive_column not in header:
        raise ColumnNotFound(sensitive_column)

    width = len(header)
    kept: list[list[str]] = []
    dropped = 0
    for row in rows:
        if len(row) != width or any(_is_missing(c) for c in row):
            dropped += 1
            continue
        kept.append([c.strip() for c in row])
    if not kept:
        raise DatasetError("no rows left after dropping incomplete ones")

    target_idx = header.index(target_column)
    raw_target = [r[target_idx] for r in kept]
    distinct = sorted(set(raw_target))
    if len(distinct) != 2:
        raise DatasetError(
            f"target column {target_column!r} has {len(distinct)} distinct values, need 2"
        )
    positive = str(positive_label)
    if positive not in distinct:
        raise DatasetError(
            f"positive label {positive!r} not present in target column (saw {distinct})"
        )
    target = np.array([1 if v == positive else 0 for v in raw_target], dtype=int)

    feature_names = [h for i, h in enumerate(header) if i != target_idx]
    columns = []
    kinds = []
    for i, h in enumerate(header):
        if i == target_idx:
            continue
        values = [r[i] for r in kept]
        numeric = _parse_numeric(values)
        if numeric is not None:
            columns.append(numeric)
            kinds.append("numeric")
        else:
            columns.append(_encode_first_appearance(values))
            kinds.append("categorical")
    features = np.column_stack(columns)

    sensitive_index = feature_names.index(sensitive_column)
    sens_raw = [r[header.index(sensitive_column)] for r in kept]
    sensitive_groups = _encode_first_appearance(sens_raw).astype(int)

    return Dataset(
        name=name or str(path),
        feature_names=tuple(feature_names),
        features=features,
        target=target,
        sensitive_index=sensitive_index,
        sensitive_groups=sensitive_groups,
        column_kinds=tuple(kinds),
        dropped_count=dropped,
    )


def stratified_split(ds: Dataset, test_fraction: float = 0.3, seed: int = 0) -> Split:
    """Deterministic stratified holdout split.

    Per-class test counts are round(test_fraction * n_class), clamped so both
    partitions keep at least one row of each class.
    """
    if not 0.0 < test_fraction < 1.0:
        raise ValueError("test_fraction must be in (0, 1)")
    rng = np.random.default_rng(seed)
    train_parts, test_parts = [], []
    for cls in (0, 1):
        idx = np.flatnonzero(ds.target == cls)
        if len(idx) < 2:
            raise DatasetError(f"class {cls} has fewer than 2 rows, cannot stratify")
        idx = rng.permutation(idx)
        n_test = int(round(test_fraction * len(idx)))
        n_test = min(max(n_test, 1), len(idx) - 1)
        test_parts.append(idx[:n_test])
        train_parts.append(idx[n_test:])
    train = np.sort(np.concatenate(train_parts))
    test = np.sort(np.concatenate(test_parts))
    return Split(train_indices=train, test_indices=test, test_fraction=test_fraction, seed=seed)
