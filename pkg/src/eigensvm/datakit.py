"""Dataset ingestion, normalization, splitting, label noise, and synthesis.

Every randomized operation here is a pure function of (input, seed): the
same call repeated gives the same partition, fold assignment, flip set, or
synthetic sample, exactly.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass

import numpy as np

from .errors import (
    ClassTooSmall,
    EmptyFile,
    InvalidFraction,
    LengthMismatch,
    MixedLabelAlphabet,
    ParseError,
)

log = logging.getLogger(__name__)

# Recognized label alphabets; in each, 1 means the positive class.
LABEL_ALPHABETS = (
    frozenset({0.0, 1.0}),
    frozenset({1.0, 2.0}),
    frozenset({-1.0, 1.0}),
)


@dataclass(frozen=True)
class Dataset:
    """Feature matrix, +1/-1 label vector, and an identifying name."""

    features: np.ndarray
    labels: np.ndarray
    name: str = "dataset"

    def __post_init__(self):
        object.__setattr__(self, "features", np.asarray(self.features, dtype=float))
        object.__setattr__(self, "labels", np.asarray(self.labels, dtype=int))
        if self.features.ndim != 2:
            raise LengthMismatch("features must be a 2-D matrix")
        if self.labels.shape != (self.features.shape[0],):
            raise LengthMismatch(
                f"{self.labels.shape[0]} labels for {self.features.shape[0]} rows"
            )
        bad = set(np.unique(self.labels)) - {-1, 1}
        if bad:
            raise MixedLabelAlphabet(f"labels must be +1/-1, found {sorted(bad)}")

    @property
    def m(self) -> int:
        return self.features.shape[0]

    @property
    def n(self) -> int:
        return self.features.shape[1]

    def take(self, idx, name: str | None = None) -> "Dataset":
        idx = np.asarray(idx, dtype=int)
        return Dataset(self.features[idx], self.labels[idx], name or self.name)


@dataclass(frozen=True)
class SplitPlan:
    train_fraction: float = 0.7
    seed: int = 0
    stratified: bool = True


def _parse_cell(token: str, row: int, col: int, path: str) -> float:
    try:
        value = float(token)
    except ValueError:
        raise ParseError(
            f"{path}: row {row}, column {col}: not a number: {token!r}"
        ) from None
    if not np.isfinite(value):
        raise ParseError(f"{path}: row {row}, column {col}: non-finite value {token!r}")
    return value


def _map_labels(raw: np.ndarray, path: str) -> np.ndarray:
    observed = frozenset(raw.tolist())
    if not any(observed <= alphabet for alphabet in LABEL_ALPHABETS):
        raise MixedLabelAlphabet(
            f"{path}: label values {sorted(observed)} fit none of the supported "
            f"alphabets {{0,1}}, {{1,2}}, {{-1,+1}}"
        )
    mapped = np.where(raw == 1.0, 1, -1)
    pairs = sorted({(v, +1 if v == 1.0 else -1) for v in observed})
    log.info(
        "label mapping for %s: %s",
        path,
        ", ".join(f"{int(src) if src.is_integer() else src} -> {dst:+d}" for src, dst in pairs),
    )
    return mapped


def load_csv(path: str, name: str | None = None, label_column: int = -1) -> Dataset:
    """Read a numeric CSV into a Dataset.

    The label lives in ``label_column`` (default: last). A single leading
    row of non-numeric text is treated as a header and skipped. Labels may
    use any one of the alphabets {0,1}, {1,2}, {-1,+1}; 1 always maps to +1
    and the other symbol to -1, with the mapping echoed to the log.
    """
    with open(path, newline="") as fh:
        rows = [row for row in csv.reader(fh)]
    rows = [row for row in rows if any(cell.strip() for cell in row)]
    if not rows:
        raise EmptyFile(f"{path}: no data rows")
    start = 0
    header_like = all(not _is_number(cell) for cell in rows[0])
    if header_like:
        start = 1
    data = rows[start:]
    if not data:
        raise EmptyFile(f"{path}: no data rows after the header")
    arity = len(data[0])
    if arity < 2:
        raise ParseError(f"{path}: rows need at least one feature and a label")
    label_col = label_column % arity
    features = np.empty((len(data), arity - 1))
    raw_labels = np.empty(len(data))
    for i, row in enumerate(data):
        file_row = start + i + 1
        if len(row) != arity:
            raise ParseError(
                f"{path}: row {file_row} has {len(row)} cells, expected {arity}"
            )
        k = 0
        for j, token in enumerate(row):
            value = _parse_cell(token.strip(), file_row, j + 1, path)
            if j == label_col:
                raw_labels[i] = value
            else:
                features[i, k] = value
                k += 1
    labels = _map_labels(raw_labels, path)
    if name is None:
        name = path.rsplit("/", 1)[-1].removesuffix(".csv")
    return Dataset(features, labels, name)


def _is_number(token: str) -> bool:
    try:
        float(token)
        return True
    except ValueError:
        return False


def load_matrix(path: str) -> np.ndarray:
    """Read a plain numeric CSV (optional single header row) as a matrix."""
    with open(path, newline="") as fh:
        rows = [row for row in csv.reader(fh)]
    rows = [row for row in rows if any(cell.strip() for cell in row)]
    if not rows:
        raise EmptyFile(f"{path}: no data rows")
    start = 1 if all(not _is_number(cell) for cell in rows[0]) else 0
    data = rows[start:]
    if not data:
        raise EmptyFile(f"{path}: no data rows after the header")
    arity = len(data[0])
    out = np.empty((len(data), arity))
    for i, row in enumerate(data):
        file_row = start + i + 1
        if len(row) != arity:
            raise ParseError(
                f"{path}: row {file_row} has {len(row)} cells, expected {arity}"
            )
        for j, token in enumerate(row):
            out[i, j] = _parse_cell(token.strip(), file_row, j + 1, path)
    return out


def map_raw_labels(raw: np.ndarray, context: str) -> np.ndarray:
    """Public wrapper over the label-alphabet mapping used by load_csv."""
    return _map_labels(np.asarray(raw, dtype=float), context)


def save_csv(ds: Dataset, path: str) -> None:
    """Write a Dataset in the CSV layout load_csv reads (label last)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"x{j + 1}" for j in range(ds.n)] + ["label"])
        for row, label in zip(ds.features, ds.labels):
            writer.writerow([repr(float(v)) for v in row] + [int(label)])


@dataclass(frozen=True)
class Scaler:
    """Affine per-feature map x -> (x - low) * scale fit on a training set."""

    low: np.ndarray
    scale: np.ndarray

    def apply(self, features: np.ndarray) -> np.ndarray:
        return (features - self.low) * self.scale


SCALER_FORMAT = "eigensvm-scaler-v1"


def save_scaler(scaler: Scaler, path: str) -> None:
    lines = [
        f"format {SCALER_FORMAT}",
        "low " + " ".join(repr(float(v)) for v in scaler.low),
        "scale " + " ".join(repr(float(v)) for v in scaler.scale),
    ]
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_scaler(path: str) -> Scaler:
    fields = {}
    with open(path) as fh:
        for line in fh:
            if line.strip():
                key, *rest = line.split()
                fields[key] = rest
    if fields.get("format") != [SCALER_FORMAT]:
        raise ParseError(f"{path}: not a {SCALER_FORMAT} file")
    return Scaler(
        low=np.array([float(v) for v in fields["low"]]),
        scale=np.array([float(v) for v in fields["scale"]]),
    )


def fit_scaler(train: Dataset) -> Scaler:
    low = train.features.min(axis=0)
    high = train.features.max(axis=0)
    span = high - low
    # constant features collapse to 0 rather than dividing by zero
    scale = np.where(span > 0, 1.0 / np.where(span > 0, span, 1.0), 0.0)
    return Scaler(low=low, scale=scale)


def minmax_normalize(train: Dataset, others: list[Dataset] | None = None):
    """Scale features to [0,1] by the train set's min/max.

    The identical affine map is applied to ``others``, whose values may
    therefore leave [0,1]; nothing is clamped. Returns
    ``(train_scaled, others_scaled, scaler)``.
    """
    scaler = fit_scaler(train)
    train_scaled = Dataset(scaler.apply(train.features), train.labels, train.name)
    others_scaled = [
        Dataset(scaler.apply(ds.features), ds.labels, ds.name) for ds in (others or [])
    ]
    return train_scaled, others_scaled, scaler


def _largest_remainder(counts: np.ndarray, fraction: float) -> np.ndarray:
    """Per-class train quotas summing to round(fraction * total)."""
    ideal = fraction * counts
    quota = np.floor(ideal).astype(int)
    leftover = int(np.rint(fraction * counts.sum())) - quota.sum()
    order = np.argsort(-(ideal - quota), kind="stable")
    for j in range(max(leftover, 0)):
        quota[order[j % len(counts)]] += 1
    # every class keeps at least one sample on each side
    quota = np.clip(quota, 1, counts - 1)
    return quota


def split(ds: Dataset, plan: SplitPlan):
    """Partition into (train, test), deterministic under plan.seed."""
    if not 0.0 < plan.train_fraction < 1.0:
        raise InvalidFraction(
            f"train_fraction must lie in (0,1), got {plan.train_fraction}"
        )
    rng = np.random.default_rng(plan.seed)
    if not plan.stratified:
        perm = rng.permutation(ds.m)
        cut = int(np.rint(plan.train_fraction * ds.m))
        cut = min(max(cut, 1), ds.m - 1)
        train_idx, test_idx = np.sort(perm[:cut]), np.sort(perm[cut:])
    else:
        class_idx = [np.flatnonzero(ds.labels == c) for c in (+1, -1)]
        for c, idx in zip((+1, -1), class_idx):
            if idx.size < 2:
                raise ClassTooSmall(
                    f"class {c:+d} has {idx.size} sample(s); stratified split needs 2"
                )
        counts = np.array([idx.size for idx in class_idx])
        quotas = _largest_remainder(counts, plan.train_fraction)
        train_parts, test_parts = [], []
        for idx, q in zip(class_idx, quotas):
            perm = rng.permutation(idx)
            train_parts.append(perm[:q])
            test_parts.append(perm[q:])
        train_idx = np.sort(np.concatenate(train_parts))
        test_idx = np.sort(np.concatenate(test_parts))
    return ds.take(train_idx, f"{ds.name}-train"), ds.take(test_idx, f"{ds.name}-test")


def kfold_indices(m: int, k: int, labels, seed: int) -> list[np.ndarray]:
    """Stratified k-fold assignment: k disjoint index arrays covering 0..m-1."""
    if k < 2:
        raise InvalidFraction(f"k must be at least 2, got {k}")
    labels = np.asarray(labels)
    if labels.shape != (m,):
        raise LengthMismatch(f"{labels.shape[0]} labels for m={m}")
    rng = np.random.default_rng(seed)
    folds: list[list[int]] = [[] for _ in range(k)]
    offset = 0
    for c in (+1, -1):
        idx = np.flatnonzero(labels == c)
        if idx.size < k:
            raise ClassTooSmall(
                f"class {c:+d} has {idx.size} sample(s); {k}-fold needs {k}"
            )
        perm = rng.permutation(idx)
        # deal round-robin, resuming where the previous class stopped so
        # fold sizes stay within one of each other overall
        for j, i in enumerate(perm):
            folds[(j + offset) % k].append(int(i))
        offset = (offset + idx.size) % k
    return [np.array(sorted(f), dtype=int) for f in folds]


def inject_label_noise(ds: Dataset, fraction: float, seed: int) -> Dataset:
    """Flip the labels of exactly round(fraction * m) rows, chosen by seed.

    Features are shared, not copied. Applying the same call to the result
    flips the same rows back, restoring the original labels.
    """
    if not 0.0 <= fraction <= 1.0:
        raise InvalidFraction(f"noise fraction must lie in [0,1], got {fraction}")
    n_flip = int(np.rint(fraction * ds.m))
    rng = np.random.default_rng(seed)
    flip = rng.choice(ds.m, size=n_flip, replace=False)
    labels = ds.labels.copy()
    labels[flip] = -labels[flip]
    return Dataset(ds.features, labels, ds.name)


def _line_abscissa(rng: np.random.Generator, count: int) -> np.ndarray:
    # X1 uniform over [0,4] union [6,10]
    u = rng.uniform(0.0, 8.0, size=count)
    return np.where(u <= 4.0, u, u + 2.0)


def _on_pos_line(x1: np.ndarray) -> np.ndarray:
    return np.column_stack([x1, x1])


def _on_neg_line(x1: np.ndarray) -> np.ndarray:
    return np.column_stack([x1, 10.0 - x1])


def gen_crossplane(
    n_per_class: int,
    outliers_pos: int = 0,
    outliers_neg: int = 0,
    seed: int = 0,
    test_per_class: int = 72,
    test_noise: float = 2.5,
    outlier_jitter: float = 0.5,
):
    """Two classes on the crossing lines X2 = X1 and X2 = 10 - X1.

    Train points sit exactly on their class's line. Outliers appended to a
    class are drawn near the OTHER class's line (jitter uniform in
    +-outlier_jitter per coordinate), which is what makes them outliers.
    Test points get uniform +-test_noise on both coordinates. Returns
    ``(train, test)`` Datasets, fully determined by the seed.
    """
    if n_per_class < 1:
        raise InvalidFraction(f"n_per_class must be at least 1, got {n_per_class}")
    rng = np.random.default_rng(seed)
    pos = _on_pos_line(_line_abscissa(rng, n_per_class))
    neg = _on_neg_line(_line_abscissa(rng, n_per_class))
    out_pos = _on_neg_line(_line_abscissa(rng, outliers_pos))
    out_pos = out_pos + rng.uniform(-1.0, 1.0, out_pos.shape) * outlier_jitter
    out_neg = _on_pos_line(_line_abscissa(rng, outliers_neg))
    out_neg = out_neg + rng.uniform(-1.0, 1.0, out_neg.shape) * outlier_jitter
    train = Dataset(
        np.vstack([pos, out_pos, neg, out_neg]),
        np.concatenate(
            [
                np.full(n_per_class + outliers_pos, +1),
                np.full(n_per_class + outliers_neg, -1),
            ]
        ),
        "crossplane-train",
    )
    tpos = _on_pos_line(_line_abscissa(rng, test_per_class))
    tneg = _on_neg_line(_line_abscissa(rng, test_per_class))
    tX = np.vstack([tpos, tneg])
    tX = tX + rng.uniform(-1.0, 1.0, tX.shape) * test_noise
    test = Dataset(
        tX,
        np.concatenate([np.full(test_per_class, +1), np.full(test_per_class, -1)]),
        "crossplane-test",
    )
    return train, test
