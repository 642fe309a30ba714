"""Cluster quality metrics over failure indicators.

All metrics are ratios of integer counts. Counts are kept exact internally
(Python ints) and converted to float only at the public boundary, so identity
checks like "leaf error coverages sum to 1" hold exactly on the counts.

Definitions, for a cluster C inside a group G with failure indicator E:

    error_rate(C)      = failures(C) / |C|
    error_coverage(C)  = failures(C) / failures(G)   (0 when failures(G) = 0)
    aler(tree)         = sum over leaves of ER(leaf) * EC(leaf)
    importance_value   = ER * EC
    aler_gain(tree)    = aler(tree) - error_rate(G)

A cluster's error rate is undefined when the cluster is empty; a group with
zero failures yields coverage 0 for every cluster by convention, so rankings
degrade gracefully instead of dividing by zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np


class UndefinedMetricError(Exception):
    """Raised when a metric's denominator is structurally empty."""


class PartitionError(Exception):
    """Raised when a tree's leaves do not partition its group."""


@dataclass(frozen=True)
class ClusterStats:
    """Exact counts plus derived rates for one cluster within one group.

    ``group_error_count`` is the failure count of the enclosing group, the
    denominator of ``error_coverage``.
    """

    size: int
    error_count: int
    group_error_count: int

    def __post_init__(self) -> None:
        if self.size <= 0:
            raise UndefinedMetricError("cluster is empty; error rate undefined")
        if not 0 <= self.error_count <= self.size:
            raise ValueError(
                f"error_count {self.error_count} outside [0, {self.size}]"
            )
        if self.group_error_count < self.error_count:
            raise ValueError(
                f"group_error_count {self.group_error_count} smaller than "
                f"cluster error_count {self.error_count}"
            )

    @property
    def error_rate(self) -> float:
        return self.error_count / self.size

    @property
    def error_coverage(self) -> float:
        if self.group_error_count == 0:
            return 0.0
        return self.error_count / self.group_error_count

    @property
    def importance_value(self) -> float:
        return importance_value(self.error_rate, self.error_coverage)

    def exact_error_rate(self) -> Fraction:
        return Fraction(self.error_count, self.size)

    def exact_error_coverage(self) -> Fraction:
        if self.group_error_count == 0:
            return Fraction(0)
        return Fraction(self.error_count, self.group_error_count)


def _as_row_array(rows) -> np.ndarray:
    rows = np.asarray(rows, dtype=np.int64)
    if rows.ndim != 1:
        raise ValueError("row sets must be 1-d index arrays")
    return rows


def error_rate(rows, failures: np.ndarray) -> float:
    """Fraction of rows whose failure indicator is set.

    Raises UndefinedMetricError for an empty row set.
    """
    rows = _as_row_array(rows)
    if rows.size == 0:
        raise UndefinedMetricError("cluster is empty; error rate undefined")
    return int(np.count_nonzero(failures[rows])) / rows.size


def error_coverage(cluster_rows, group_rows, failures: np.ndarray) -> float:
    """Share of the group's failures that fall inside the cluster.

    The cluster must be a subset of the group. A zero-failure group yields
    coverage 0 for every cluster.
    """
    cluster_rows = _as_row_array(cluster_rows)
    group_rows = _as_row_array(group_rows)
    if not np.isin(cluster_rows, group_rows).all():
        raise ValueError("cluster rows are not a subset of the group rows")
    group_errors = int(np.count_nonzero(failures[group_rows]))
    if group_errors == 0:
        return 0.0
    return int(np.count_nonzero(failures[cluster_rows])) / group_errors


def importance_value(er: float, ec: float) -> float:
    """Rank score for a failure mode: error rate times error coverage."""
    return er * ec


def aler(tree) -> float:
    """Average leaf error rate, failure-weighted: sum of leaf ER * EC.

    Verifies the partition identity first — leaf sizes must sum to the
    group size and leaf error counts to the group error count — and raises
    PartitionError otherwise. Zero-failure groups yield 0.0.
    """
    leaves = tree.leaves()
    total_size = sum(leaf.stats.size for leaf in leaves)
    total_errors = sum(leaf.stats.error_count for leaf in leaves)
    if total_size != tree.group_size:
        raise PartitionError(
            f"leaf sizes sum to {total_size}, group size is {tree.group_size}"
        )
    if total_errors != tree.group_error_count:
        raise PartitionError(
            f"leaf error counts sum to {total_errors}, group has "
            f"{tree.group_error_count} failures"
        )
    if tree.group_error_count == 0:
        return 0.0
    # Exact accumulation: ALER = sum e_l^2 / (n_l * E) over leaves.
    total = Fraction(0)
    for leaf in leaves:
        total += Fraction(
            leaf.stats.error_count * leaf.stats.error_count,
            leaf.stats.size * tree.group_error_count,
        )
    return float(total)


def aler_gain(tree) -> float:
    """ALER minus the group's base error rate (non-negative by refinement)."""
    if tree.group_size == 0:
        raise UndefinedMetricError("group is empty; base error rate undefined")
    return aler(tree) - tree.group_error_count / tree.group_size
