"""Discrete information-theoretic estimators and the feature-selection objective.

All estimators are plug-in (maximum-likelihood) estimates over empirical
frequencies, in bits (log base 2). The selection objective is the conditional
entropy of the labels given a candidate feature subset: a subset that fully
determines the labels drives it to zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

# Negative values smaller than this are floating-point cancellation, not signal.
NEG_CLAMP = 1e-12

# Compact joint codes before they can overflow a signed 64-bit integer.
_CODE_LIMIT = 2**62


@dataclass(frozen=True)
class DiscretizationSpec:
    """Equal-width binning configuration for continuous inputs.

    ``bins`` is either one bin count applied to every column or a per-column
    sequence. Any column with more than one distinct value needs at least
    two bins.
    """

    bins: int | Sequence[int] = 10

    def bins_for(self, m: int) -> np.ndarray:
        if isinstance(self.bins, int):
            counts = np.full(m, self.bins, dtype=np.int64)
        else:
            counts = np.asarray(self.bins, dtype=np.int64)
            if counts.shape != (m,):
                raise ValueError(
                    f"discretization spec has {counts.size} bin counts, expected {m}"
                )
        if np.any(counts < 1):
            raise ValueError("bin counts must be positive")
        return counts


@dataclass(frozen=True)
class DiscreteDataset:
    """Integer-coded feature matrix with labels.

    ``features`` is an n x m matrix of non-negative integer codes and
    ``labels`` an n-vector of non-negative integer codes. Discretization
    happens before construction. Instances are immutable.
    """

    features: np.ndarray
    labels: np.ndarray
    feature_names: tuple[str, ...] = field(default=())

    def __post_init__(self) -> None:
        features = np.asarray(self.features)
        labels = np.asarray(self.labels)
        if features.ndim != 2 or features.shape[0] < 1 or features.shape[1] < 1:
            raise ValueError("features must be a non-empty 2-D matrix")
        if labels.ndim != 1 or labels.shape[0] != features.shape[0]:
            raise ValueError("labels must be a vector with one entry per row")
        for arr, what in ((features, "feature"), (labels, "label")):
            if not np.issubdtype(arr.dtype, np.integer):
                if not np.all(np.isfinite(arr)) or np.any(arr != np.floor(arr)):
                    raise ValueError(f"{what} values must be finite integers")
                arr = arr.astype(np.int64)
            if np.any(arr < 0):
                raise ValueError(f"{what} values must be non-negative")
        features = features.astype(np.int64, copy=True)
        labels = labels.astype(np.int64, copy=True)
        features.setflags(write=False)
        labels.setflags(write=False)
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "labels", labels)
        names = self.feature_names
        if not names:
            names = tuple(f"f{i}" for i in range(features.shape[1]))
        else:
            names = tuple(names)
            if len(names) != features.shape[1]:
                raise ValueError("feature_names length must equal feature count")
        object.__setattr__(self, "feature_names", names)

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def m(self) -> int:
        return self.features.shape[1]


def validate_mask(mask: np.ndarray | Sequence[int], m: int) -> np.ndarray:
    """Check a binary feature mask against a feature count and return it as bools."""
    arr = np.asarray(mask)
    if arr.ndim != 1 or arr.shape[0] != m:
        raise ValueError(f"mask has length {arr.shape}, expected ({m},)")
    if not np.all((arr == 0) | (arr == 1)):
        raise ValueError("mask entries must be 0 or 1")
    return arr.astype(bool)


def discretize(real_matrix: np.ndarray, spec: DiscretizationSpec) -> np.ndarray:
    """Map each column of a real-valued matrix to equal-width bin indices.

    A value at the boundary between two bins goes to the upper bin; the
    column maximum goes to the last bin. Constant columns map to bin 0.
    """
    data = np.asarray(real_matrix, dtype=np.float64)
    if data.ndim != 2:
        raise ValueError("input matrix must be 2-D")
    n, m = data.shape
    counts = spec.bins_for(m)
    codes = np.zeros((n, m), dtype=np.int64)
    for j in range(m):
        col = data[:, j]
        if not np.all(np.isfinite(col)):
            raise ValueError(f"non-finite value in column {j}")
        lo, hi = col.min(), col.max()
        if hi == lo:
            continue
        if counts[j] < 2:
            raise ValueError(f"column {j} varies but has fewer than 2 bins")
        scaled = (col - lo) / (hi - lo) * counts[j]
        codes[:, j] = np.clip(np.floor(scaled).astype(np.int64), 0, counts[j] - 1)
    return codes


def _entropy_of_codes(codes: np.ndarray) -> float:
    _, counts = np.unique(codes, return_counts=True)
    probs = counts / codes.shape[0]
    return float(-np.sum(probs * np.log2(probs)))


def _joint_codes(columns: np.ndarray) -> np.ndarray:
    """Collapse the rows of an integer matrix into one code per distinct tuple."""
    n = columns.shape[0]
    codes = np.zeros(n, dtype=np.int64)
    radix = 1
    for j in range(columns.shape[1]):
        col = columns[:, j]
        card = int(col.max()) + 1
        if radix * card >= _CODE_LIMIT:
            _, codes = np.unique(codes, return_inverse=True)
            radix = int(codes.max()) + 1
            if radix * card >= _CODE_LIMIT:
                raise ValueError("joint state space too large to encode")
        codes = codes * card + col
        radix *= card
    return codes


def entropy(labels: np.ndarray | Sequence[int]) -> float:
    """Plug-in entropy of an integer vector, in bits."""
    arr = np.asarray(labels)
    if arr.ndim != 1 or arr.shape[0] == 0:
        raise ValueError("labels must be a non-empty vector")
    return _entropy_of_codes(arr)


def conditional_entropy(dataset: DiscreteDataset, mask: np.ndarray | Sequence[int]) -> float:
    """Plug-in conditional entropy of the labels given the masked features, in bits.

    Rows are grouped on the exact tuple of masked feature values; the empty
    mask reduces to the label entropy.
    """
    selected = validate_mask(mask, dataset.m)
    if not selected.any():
        return entropy(dataset.labels)
    joint = _joint_codes(dataset.features[:, selected])
    # H(y|U) = H(U, y) - H(U), both from empirical joint counts.
    pair = np.column_stack([joint, dataset.labels])
    value = _entropy_of_codes(_joint_codes(pair)) - _entropy_of_codes(joint)
    return 0.0 if -NEG_CLAMP < value < 0.0 else value


def mutual_information(dataset: DiscreteDataset, mask: np.ndarray | Sequence[int]) -> float:
    """I(U; y) = H(y) - H(y|U) in bits; tiny negative rounding is clamped to 0."""
    value = entropy(dataset.labels) - conditional_entropy(dataset, mask)
    return 0.0 if abs(value) < NEG_CLAMP else max(value, 0.0)
