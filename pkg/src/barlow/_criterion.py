"""Shared binary-split scoring on the failure indicator.

Feature scoring and tree induction must agree exactly on how good a
threshold is, so both go through this module: the mutual-information
estimate for a feature is defined as the information gain of its best
binary split, and the tree's split search maximizes the same quantity
with the same arithmetic (same function, hence bit-for-bit identical).

Scoring works on exact integer counts. For a column v and failure
indicator E over n rows, candidate thresholds are the midpoints between
consecutive distinct sorted values; a candidate t induces the partition
{v < t} / {v >= t} and its information gain in bits is

    IG(t) = H(e, n) - (n_l / n) H(e_l, n_l) - (n_r / n) H(e_r, n_r)

with H(e, n) the binary entropy of e/n (0 log 0 = 0). Ties between
candidates resolve to the lowest threshold; gains are compared as
computed floats. A constant column has no candidates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ColumnSplit:
    """Best binary split of one column.

    ``separable`` is False for constant columns, in which case
    ``threshold`` is the constant value and ``gain_bits`` is 0.
    """

    threshold: float
    gain_bits: float
    separable: bool


def entropy_bits(error_count: int, total: int) -> float:
    """Binary entropy, in bits, of a count ratio; 0 for empty/pure sets.

    Computed on min(e, total - e) so complementary counts (e and
    total - e) produce the same float exactly — mathematical ties between
    candidate splits then tie exactly instead of drifting by an ulp.
    """
    if total <= 0 or error_count <= 0 or error_count >= total:
        return 0.0
    minority = min(error_count, total - error_count)
    p = minority / total
    q = (total - minority) / total
    return -(p * math.log2(p) + q * math.log2(q))


def _entropy_bits_array(error_counts: np.ndarray, totals: np.ndarray) -> np.ndarray:
    """Vectorized entropy_bits (same minority-count canonicalization)."""
    out = np.zeros(error_counts.shape, dtype=np.float64)
    mixed = (error_counts > 0) & (error_counts < totals)
    minority = np.minimum(error_counts[mixed], totals[mixed] - error_counts[mixed])
    p = minority / totals[mixed]
    q = (totals[mixed] - minority) / totals[mixed]
    out[mixed] = -(p * np.log2(p) + q * np.log2(q))
    return out


def scan_column(values: np.ndarray, failures: np.ndarray) -> ColumnSplit:
    """Best-gain threshold for one column of activations.

    Args:
        values: 1-d activations for the rows under consideration.
        failures: aligned boolean failure indicator.

    Returns:
        ColumnSplit with the lowest threshold among maximal-gain candidates.
    """
    values = np.asarray(values, dtype=np.float64)
    n = values.size
    if n < 2:
        constant = float(values[0]) if n else 0.0
        return ColumnSplit(threshold=constant, gain_bits=0.0, separable=False)

    order = np.argsort(values)
    v = values[order]
    f = np.asarray(failures, dtype=bool)[order]

    # Candidate boundaries: positions i where v[i] < v[i+1].
    cuts = np.nonzero(v[:-1] < v[1:])[0]
    if cuts.size == 0:
        return ColumnSplit(threshold=float(v[0]), gain_bits=0.0, separable=False)

    total_errors = int(np.count_nonzero(f))
    parent = entropy_bits(total_errors, n)

    left_sizes = cuts + 1
    left_errors = np.cumsum(f, dtype=np.int64)[cuts]
    right_sizes = n - left_sizes
    right_errors = total_errors - left_errors
    conditional = (left_sizes / n) * _entropy_bits_array(left_errors, left_sizes) + (
        right_sizes / n
    ) * _entropy_bits_array(right_errors, right_sizes)
    gains = parent - conditional

    best = int(np.argmax(gains))  # first maximum -> lowest threshold
    lo = float(v[cuts[best]])
    hi = float(v[cuts[best] + 1])
    threshold = 0.5 * (lo + hi)
    if threshold <= lo:  # adjacent floats can round the midpoint down onto lo
        threshold = hi
    return ColumnSplit(threshold=threshold, gain_bits=float(gains[best]), separable=True)
