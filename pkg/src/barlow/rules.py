"""End-to-end failure-mode mining for one group of images.

The pipeline for a (grouping, class) pair:

    1. collect the group's rows and its base error rate (BER),
    2. rank features by mutual information with the failure indicator
       and keep the top k (disabled features are removed first, so the
       ranking is re-run over what remains),
    3. induce a shallow decision tree on those features,
    4. keep leaves whose error rate exceeds BER + rho and whose error
       coverage exceeds tau — those are the failure modes,
    5. rank modes by importance value (ER * EC), ties by rule path.

Empty groups are legal: the result carries no tree and no modes, which
reports render as "no data" rather than an error. Zero-failure groups
need no special casing — the root is pure, coverage is 0 everywhere,
and no leaf passes the filter.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from barlow import metrics, selection, tree as tree_mod
from barlow.dataset import DatasetBundle, Grouping
from barlow.metrics import ClusterStats
from barlow.selection import FeatureScore
from barlow.tree import DecisionTree, LeafNode, SplitPredicate

MAX_TREE_DEPTH = 3


@dataclass(frozen=True)
class AnalysisConfig:
    """Mining knobs; defaults follow the method's reference settings."""

    k: int = 20
    max_depth: int = 1
    rho: float = 0.1
    tau: float = 0.2
    min_samples_split: int = 2
    disabled_features: tuple[int, ...] = ()
    top_count: int = 6

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if not 1 <= self.max_depth <= MAX_TREE_DEPTH:
            raise ValueError(
                f"max_depth must be in [1, {MAX_TREE_DEPTH}], got {self.max_depth}"
            )
        if self.rho < 0.0:
            raise ValueError(f"rho must be >= 0, got {self.rho}")
        if not 0.0 <= self.tau <= 1.0:
            raise ValueError(f"tau must be in [0, 1], got {self.tau}")
        if self.min_samples_split < 2:
            raise ValueError(
                f"min_samples_split must be >= 2, got {self.min_samples_split}"
            )
        if self.top_count < 1:
            raise ValueError(f"top_count must be >= 1, got {self.top_count}")
        object.__setattr__(
            self,
            "disabled_features",
            tuple(sorted(set(int(i) for i in self.disabled_features))),
        )


def rule_path(route: tuple[tuple[SplitPredicate, bool], ...]) -> str:
    """Human-readable conjunction for a root-to-leaf predicate chain."""
    if not route:
        return "(entire group)"
    return " AND ".join(predicate.describe(went_left) for predicate, went_left in route)


@dataclass(frozen=True)
class FailureMode:
    """One mined mode: a valid leaf with its rule and statistics."""

    rank: int
    path: str
    route: tuple[tuple[SplitPredicate, bool], ...]
    stats: ClusterStats
    rows: tuple[int, ...]

    @property
    def importance_value(self) -> float:
        return self.stats.importance_value


@dataclass(frozen=True)
class LeafSummary:
    """A leaf's stats plus its rule, independent of mode validity."""

    path: str
    stats: ClusterStats
    valid: bool


@dataclass(frozen=True)
class AnalysisResult:
    """Everything one (grouping, class) analysis produced."""

    grouping: Grouping
    class_index: int
    class_name: str
    group_size: int
    group_error_count: int
    config: AnalysisConfig
    feature_scores: tuple[FeatureScore, ...] = ()
    tree: DecisionTree | None = None
    aler: float | None = None
    gain: float | None = None
    modes: tuple[FailureMode, ...] = ()
    top_leaf: LeafSummary | None = None
    leaves: tuple[LeafSummary, ...] = field(default=(), repr=False)

    @property
    def has_data(self) -> bool:
        return self.group_size > 0

    @property
    def base_error_rate(self) -> float:
        if self.group_size == 0:
            raise metrics.UndefinedMetricError("group is empty; base error rate undefined")
        return self.group_error_count / self.group_size


def _mode_is_valid(stats: ClusterStats, ber: float, config: AnalysisConfig) -> bool:
    return stats.error_rate > ber + config.rho and stats.error_coverage > config.tau


def analyze_grouping(
    bundle: DatasetBundle,
    grouping: Grouping,
    class_index: int,
    config: AnalysisConfig | None = None,
) -> AnalysisResult:
    """Mine failure modes for one class under one grouping.

    Raises KeyError for a class absent from the bundle's class table;
    an *empty* group for a known class is a no-data result, not an error.
    """
    config = config or AnalysisConfig()
    rows = bundle.group_rows(grouping, class_index)
    class_name = bundle.classes[class_index]
    if rows.size == 0:
        return AnalysisResult(
            grouping=grouping,
            class_index=class_index,
            class_name=class_name,
            group_size=0,
            group_error_count=0,
            config=config,
        )

    failures = bundle.failures
    group_errors = int(np.count_nonzero(failures[rows]))
    ber = group_errors / rows.size

    scores = tuple(
        selection.select_top_k(
            bundle.features, failures, rows, config.k, config.disabled_features
        )
        if rows.size >= 2
        else ()
    )
    subset = tuple(score.feature_index for score in scores)
    induced = tree_mod.induce(
        bundle.features,
        failures,
        rows,
        subset,
        max_depth=config.max_depth,
        min_samples_split=config.min_samples_split,
    )
    tree_aler = metrics.aler(induced)
    gain = metrics.aler_gain(induced)

    leaf_summaries: list[LeafSummary] = []
    mode_entries: list[tuple[LeafNode, tuple[tuple[SplitPredicate, bool], ...], str]] = []
    for leaf, route in induced.leaf_routes():
        path = rule_path(route)
        valid = _mode_is_valid(leaf.stats, ber, config)
        leaf_summaries.append(LeafSummary(path=path, stats=leaf.stats, valid=valid))
        if valid:
            mode_entries.append((leaf, route, path))

    # Rank: importance value descending, ties by rule path ascending.
    mode_entries.sort(key=lambda entry: (-entry[0].stats.importance_value, entry[2]))
    modes = tuple(
        FailureMode(
            rank=rank,
            path=path,
            route=route,
            stats=leaf.stats,
            rows=tuple(int(r) for r in leaf.rows),
        )
        for rank, (leaf, route, path) in enumerate(mode_entries, start=1)
    )

    # Highest importance value; ties resolve to the smallest rule path.
    top_leaf = min(
        leaf_summaries, key=lambda s: (-s.stats.importance_value, s.path)
    )

    return AnalysisResult(
        grouping=grouping,
        class_index=class_index,
        class_name=class_name,
        group_size=int(rows.size),
        group_error_count=group_errors,
        config=config,
        feature_scores=scores,
        tree=induced,
        aler=tree_aler,
        gain=gain,
        modes=modes,
        top_leaf=top_leaf,
        leaves=tuple(leaf_summaries),
    )


def generate_failure_modes(
    bundle: DatasetBundle,
    grouping: Grouping,
    class_index: int,
    config: AnalysisConfig | None = None,
) -> tuple[FailureMode, ...]:
    """The ranked modes alone; see analyze_grouping for the full result."""
    return analyze_grouping(bundle, grouping, class_index, config).modes


def valid_leaf_fraction(results) -> float:
    """Share of analyzed, non-empty groups whose top-IV leaf is a valid mode.

    The top leaf is the importance-value argmax over *all* leaves, not
    just the filtered modes. Raises if no non-empty group is present.
    """
    total = 0
    valid = 0
    for result in results:
        if not result.has_data:
            continue
        total += 1
        if result.top_leaf is not None and result.top_leaf.valid:
            valid += 1
    if total == 0:
        raise metrics.UndefinedMetricError(
            "valid_leaf_fraction needs at least one non-empty group"
        )
    return valid / total
