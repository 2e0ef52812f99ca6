"""Datasets: synthetic generators, CSV ingestion, splitting, standardization.

Three CSV schemas are understood (UTF-8, comma-separated, one header row,
label column last):

* ``cancer``  -- 30 named numeric columns + ``diagnosis`` in {M, B};
  M (malignant) maps to label 1, B (benign) to 0.
* ``printer`` -- columns tensile_strength, elastic_modulus,
  elongation_at_break, extrusion_temperature, layer_height,
  bed_temperature, print_speed + ``printer`` in {makerbot, ultimaker,
  zortrax} (case-insensitive), mapped to labels 0/1/2.
* ``generic`` -- any numeric feature columns + a non-negative integer label;
  the class count is inferred as max label + 1.

The two-cluster generator arranges two clusters per class in an XOR
pattern: class 0 on the x axis at (-2, 0) and (2, 0), class 1 on the y
axis at (0, -2) and (0, 2), isotropic Gaussian noise.  The printer-like
generator is a synthetic stand-in with the real data's shape (104 x 7,
three classes) for CI and offline runs.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConfigError, DataError
from .numerics import RngStream

log = logging.getLogger(__name__)

TWO_CLUSTER_SIGMA = 0.4
CANCER_EXPECTED_ROWS = 569
PRINTER_EXPECTED_ROWS = 104

PRINTER_FEATURES = (
    "tensile_strength",
    "elastic_modulus",
    "elongation_at_break",
    "extrusion_temperature",
    "layer_height",
    "bed_temperature",
    "print_speed",
)
PRINTER_LABELS = {"makerbot": 0, "ultimaker": 1, "zortrax": 2}
CANCER_LABELS = {"M": 1, "B": 0}

# Printer-like surrogate: per-class feature means and shared stds, loosely
# scaled like FFF tensile-test data.  Classes overlap enough that width-2
# models land well below perfect accuracy.
_PRINTER_MEANS = np.array(
    [
        [42.0, 2100.0, 4.5, 230.0, 0.20, 70.0, 50.0],  # makerbot
        [48.0, 2400.0, 3.5, 215.0, 0.15, 60.0, 55.0],  # ultimaker
        [38.0, 1900.0, 6.0, 245.0, 0.25, 90.0, 45.0],  # zortrax
    ]
)
_PRINTER_STDS = np.array([5.0, 250.0, 1.2, 10.0, 0.05, 10.0, 12.0])
_PRINTER_CLASS_SIZES = (35, 35, 34)


@dataclass
class Dataset:
    features: np.ndarray  # (n, D) float64
    labels: np.ndarray  # (n,) int64 in [0, class_count)
    class_count: int
    feature_names: Optional[tuple] = None

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.features.ndim != 2 or self.features.shape[0] != self.labels.shape[0]:
            raise DataError(
                f"features {self.features.shape} and labels {self.labels.shape} disagree"
            )
        if self.n < 1:
            raise DataError("dataset must contain at least one sample")
        if not np.all(np.isfinite(self.features)):
            raise DataError("dataset contains non-finite feature values")
        if self.labels.min() < 0 or self.labels.max() >= self.class_count:
            raise DataError(
                f"labels must lie in [0, {self.class_count}), "
                f"got {self.labels.min()}..{self.labels.max()}"
            )

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def dim(self) -> int:
        return self.features.shape[1]


@dataclass
class SplitPair:
    train: Dataset
    test: Dataset
    split_seed: Optional[int] = None


@dataclass
class Standardizer:
    """Per-feature mean/std computed on the training split only."""

    mean: np.ndarray
    std: np.ndarray

    @classmethod
    def fit(cls, features: np.ndarray) -> "Standardizer":
        mean = features.mean(axis=0)
        std = features.std(axis=0)
        std = np.where(std > 0, std, 1.0)  # constant features divide by 1
        return cls(mean, std)

    def transform(self, features: np.ndarray) -> np.ndarray:
        return (features - self.mean) / self.std


def gen_two_cluster(n: int, rng: RngStream, sigma: float = TWO_CLUSTER_SIGMA) -> Dataset:
    """Two classes x two clusters each, n/4 points per cluster."""
    if n < 8 or n % 4 != 0:
        raise ConfigError(f"two-cluster size must be >= 8 and divisible by 4, got {n}")
    quarter = n // 4
    centers = np.array([[-2.0, 0.0], [2.0, 0.0], [0.0, -2.0], [0.0, 2.0]])
    blocks = [c + sigma * rng.standard_normal((quarter, 2)) for c in centers]
    labels = np.repeat([0, 0, 1, 1], quarter)
    return Dataset(np.vstack(blocks), labels, 2, feature_names=("x0", "x1"))


def gen_printer_like(rng: RngStream) -> Dataset:
    """Synthetic 104 x 7 three-class surrogate for the printer data."""
    blocks, labels = [], []
    for cls, size in enumerate(_PRINTER_CLASS_SIZES):
        noise = rng.standard_normal((size, len(PRINTER_FEATURES)))
        blocks.append(_PRINTER_MEANS[cls] + noise * _PRINTER_STDS)
        labels.extend([cls] * size)
    return Dataset(np.vstack(blocks), np.array(labels), 3, feature_names=PRINTER_FEATURES)


def _parse_float(text, row, col_name):
    try:
        value = float(text)
    except ValueError:
        raise DataError(f"row {row}, column {col_name!r}: cannot parse {text!r} as a number")
    if not np.isfinite(value):
        raise DataError(f"row {row}, column {col_name!r}: non-finite value {text!r}")
    return value


def load_csv(path, schema: str) -> Dataset:
    """Parse one of the three supported schemas into a Dataset."""
    if schema not in ("cancer", "printer", "generic"):
        raise ConfigError(f"unknown CSV schema {schema!r}")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file")
        rows = [r for r in reader if r]

    header = [h.strip() for h in header]
    if schema == "cancer":
        if len(header) != 31 or header[-1] != "diagnosis":
            raise DataError(
                f"cancer schema needs 30 feature columns + 'diagnosis', got {len(header)} "
                f"columns ending in {header[-1]!r}"
            )
    elif schema == "printer":
        expected = list(PRINTER_FEATURES) + ["printer"]
        if header != expected:
            raise DataError(f"printer schema header mismatch: got {header}")
    else:
        if len(header) < 2:
            raise DataError("generic schema needs at least one feature column + label")

    n_features = len(header) - 1
    features = np.empty((len(rows), n_features))
    raw_labels = []
    for r, row in enumerate(rows, start=2):  # header is line 1
        if len(row) != len(header):
            raise DataError(f"row {r}: expected {len(header)} cells, got {len(row)}")
        for c in range(n_features):
            features[r - 2, c] = _parse_float(row[c].strip(), r, header[c])
        raw_labels.append(row[-1].strip())

    if schema == "cancer":
        labels, class_count = _map_labels(raw_labels, CANCER_LABELS, case_sensitive=True), 2
        _warn_rows(path, len(rows), CANCER_EXPECTED_ROWS, "cancer")
    elif schema == "printer":
        labels = _map_labels([s.lower() for s in raw_labels], PRINTER_LABELS)
        class_count = 3
        _warn_rows(path, len(rows), PRINTER_EXPECTED_ROWS, "printer")
    else:
        labels = []
        for r, text in enumerate(raw_labels, start=2):
            try:
                value = int(text)
            except ValueError:
                raise DataError(f"row {r}, column {header[-1]!r}: label {text!r} is not an integer")
            if value < 0:
                raise DataError(f"row {r}: negative label {value}")
            labels.append(value)
        labels = np.array(labels, dtype=np.int64)
        class_count = int(labels.max()) + 1 if len(labels) else 0
        if class_count < 2:
            raise DataError(f"{path}: need at least two classes, found {class_count}")

    return Dataset(features, np.asarray(labels), class_count, feature_names=tuple(header[:-1]))


def _map_labels(raw, mapping, case_sensitive=False):
    out = []
    for r, text in enumerate(raw, start=2):
        key = text if case_sensitive else text.lower()
        if key not in mapping:
            raise DataError(f"row {r}: unknown label {text!r}, expected one of {sorted(mapping)}")
        out.append(mapping[key])
    return np.array(out, dtype=np.int64)


def _warn_rows(path, found, expected, schema):
    if found != expected:
        log.warning("%s: %s schema usually has %d rows, found %d", path, schema, expected, found)


def save_csv(data: Dataset, path):
    """Write a Dataset in the generic schema (features + integer label)."""
    names = data.feature_names or tuple(f"x{i}" for i in range(data.dim))
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow([*names, "label"])
        for x, y in zip(data.features, data.labels):
            writer.writerow([repr(float(v)) for v in x] + [int(y)])


def stratified_split(
    data: Dataset, test_frac: float, rng: RngStream, split_seed: Optional[int] = None
) -> SplitPair:
    """Per-class shuffle, then round(class_n * test_frac) samples to test.

    Rounding is half-up; the test allocation is capped at class_n - 1 so
    every class keeps at least one training sample.
    """
    if not 0.0 < test_frac < 1.0:
        raise ConfigError(f"test fraction must be in (0, 1), got {test_frac}")
    train_idx, test_idx = [], []
    for cls in range(data.class_count):
        idx = np.flatnonzero(data.labels == cls)
        if len(idx) < 2:
            raise DataError(f"class {cls} has {len(idx)} samples; need at least 2 to split")
        perm = rng.permutation(idx)
        n_test = min(int(np.floor(len(idx) * test_frac + 0.5)), len(idx) - 1)
        test_idx.append(perm[:n_test])
        train_idx.append(perm[n_test:])
    train_idx = np.concatenate(train_idx)
    test_idx = np.concatenate(test_idx)
    make = lambda idx: Dataset(
        data.features[idx], data.labels[idx], data.class_count, data.feature_names
    )
    return SplitPair(make(train_idx), make(test_idx), split_seed)


def standardize_fit_apply(pair: SplitPair) -> SplitPair:
    """Standardize both splits using statistics fitted on train only."""
    scaler = Standardizer.fit(pair.train.features)
    transform = lambda d: Dataset(
        scaler.transform(d.features), d.labels, d.class_count, d.feature_names
    )
    return SplitPair(transform(pair.train), transform(pair.test), pair.split_seed)
