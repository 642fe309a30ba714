"""Mutual-information feature scoring and top-k selection.

The MI estimate between a feature column and the binary failure
indicator is the information gain of the column's best binary split
(see barlow._criterion). This is exactly the quantity a depth-1
decision tree maximizes, so selection and induction rank thresholds
identically by construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from barlow._criterion import scan_column


@dataclass(frozen=True)
class FeatureScore:
    """MI estimate for one feature over one group of rows.

    ``best_threshold`` is the argmax threshold (for a constant column:
    the constant itself, with 0 bits).
    """

    feature_index: int
    mi_bits: float
    best_threshold: float


def mutual_information(
    features: np.ndarray,
    failures: np.ndarray,
    rows: np.ndarray,
    feature_index: int,
) -> FeatureScore:
    """Score one feature against the failure indicator on ``rows``."""
    rows = np.asarray(rows, dtype=np.int64)
    if rows.size < 2:
        raise ValueError("mutual information needs at least 2 rows")
    split = scan_column(features[rows, feature_index], failures[rows])
    return FeatureScore(
        feature_index=int(feature_index),
        mi_bits=split.gain_bits,
        best_threshold=split.threshold,
    )


def select_top_k(
    features: np.ndarray,
    failures: np.ndarray,
    rows: np.ndarray,
    k: int,
    disabled: Iterable[int] = (),
) -> list[FeatureScore]:
    """Top-k features by MI, descending; ties broken by ascending index.

    ``disabled`` features are excluded before ranking, so selection is
    re-run over the remaining features rather than truncated. Returns
    fewer than k scores only when fewer enabled features exist.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    disabled_set = set(int(i) for i in disabled)
    n_features = features.shape[1]
    for index in disabled_set:
        if not 0 <= index < n_features:
            raise IndexError(f"disabled feature {index} out of range [0, {n_features})")
    scores = [
        mutual_information(features, failures, rows, index)
        for index in range(n_features)
        if index not in disabled_set
    ]
    # Greedy argmax with ascending-index tie-break == sort by (-mi, index).
    scores.sort(key=lambda s: (-s.mi_bits, s.feature_index))
    return scores[:k]


def top_activating(
    features: np.ndarray,
    rows: Sequence[int] | np.ndarray,
    feature_index: int,
    count: int = 6,
) -> list[int]:
    """Rows with the highest activation of a feature, strongest first.

    Ties resolve to the lower row index; returns at most ``count`` rows.
    """
    rows = np.asarray(rows, dtype=np.int64)
    activations = features[rows, feature_index]
    # stable sort on -activation keeps ascending row order within ties
    order = np.argsort(-activations.astype(np.float64), kind="stable")
    return [int(r) for r in rows[order[:count]]]
