"""Shallow decision trees over feature thresholds, trained on failures.

Induction is greedy: each node takes the (feature, threshold) pair with
the highest information gain on the failure indicator, computed by the
same column scan that feature selection uses. Rows with activation
strictly below the threshold go left; ties between candidate splits
resolve to higher gain, then lower feature index, then lower threshold.

Trees serialize to a nested JSON-ready document:

    {"split": {"feature": i, "threshold": t}, "left": ..., "right": ...}
    {"leaf": {"size": n, "errors": e, "er": ..., "ec": ..., "iv": ...}}

The document's root node is the whole document; group size and group
failure count are recovered by summing leaves, so a round trip through
serialize/deserialize reproduces the document byte-for-byte once
rendered canonically (see barlow.report.canonical_json).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from barlow._criterion import scan_column
from barlow.metrics import ClusterStats


class TreeDocumentError(Exception):
    """Raised when a serialized tree document fails validation."""


@dataclass(frozen=True)
class SplitPredicate:
    """Axis-aligned test: rows go left iff feature value < threshold."""

    feature_index: int
    threshold: float

    def describe(self, branch_left: bool) -> str:
        op = "<" if branch_left else ">="
        return f"feature[{self.feature_index}] {op} {self.threshold!r}"


@dataclass
class LeafNode:
    """A leaf cluster. ``rows`` is populated by induce, absent after
    deserialization (documents carry counts only)."""

    stats: ClusterStats
    rows: np.ndarray | None = field(default=None, repr=False)


@dataclass
class InternalNode:
    split: SplitPredicate
    left: "Node"
    right: "Node"


Node = LeafNode | InternalNode


@dataclass
class DecisionTree:
    """An induced (or deserialized) tree plus its group's totals."""

    root: Node
    group_size: int
    group_error_count: int
    feature_subset: tuple[int, ...] = ()

    def leaves(self) -> list[LeafNode]:
        """Leaves in left-to-right order."""
        return [leaf for leaf, _ in self.leaf_routes()]

    def leaf_routes(self) -> list[tuple[LeafNode, tuple[tuple[SplitPredicate, bool], ...]]]:
        """Leaves with their root-to-leaf predicate chains.

        Each chain entry is (predicate, went_left).
        """
        routes: list[tuple[LeafNode, tuple[tuple[SplitPredicate, bool], ...]]] = []

        def walk(node: Node, chain: tuple[tuple[SplitPredicate, bool], ...]) -> None:
            if isinstance(node, LeafNode):
                routes.append((node, chain))
                return
            walk(node.left, chain + ((node.split, True),))
            walk(node.right, chain + ((node.split, False),))

        walk(self.root, ())
        return routes

    def depth(self) -> int:
        def walk(node: Node) -> int:
            if isinstance(node, LeafNode):
                return 0
            return 1 + max(walk(node.left), walk(node.right))

        return walk(self.root)


def best_split(
    features: np.ndarray,
    failures: np.ndarray,
    rows: np.ndarray,
    feature_subset,
) -> tuple[SplitPredicate, float] | None:
    """Highest-gain split of ``rows`` over the feature subset.

    Returns None when no candidate has positive gain (constant columns,
    pure nodes, or separations that carry no information). Ties resolve
    to the lower feature index, then the lower threshold.
    """
    rows = np.asarray(rows, dtype=np.int64)
    if rows.size < 2:
        return None
    node_failures = failures[rows]
    best: tuple[float, int, float] | None = None
    for feature_index in sorted(set(int(i) for i in feature_subset)):
        split = scan_column(features[rows, feature_index], node_failures)
        if not split.separable:
            continue
        if best is None or split.gain_bits > best[0]:
            best = (split.gain_bits, feature_index, split.threshold)
    if best is None or best[0] <= 0.0:
        return None
    gain, feature_index, threshold = best
    return SplitPredicate(feature_index=feature_index, threshold=threshold), gain


def induce(
    features: np.ndarray,
    failures: np.ndarray,
    rows: np.ndarray,
    feature_subset,
    max_depth: int = 1,
    min_samples_split: int = 2,
) -> DecisionTree:
    """Greedy recursive induction on the failure indicator.

    Recursion stops at the depth cap, on pure nodes, on nodes smaller
    than ``min_samples_split``, and when no split has positive gain.
    Every leaf keeps its (ascending) row indices.
    """
    if max_depth < 1:
        raise ValueError(f"max_depth must be >= 1, got {max_depth}")
    if min_samples_split < 2:
        raise ValueError(f"min_samples_split must be >= 2, got {min_samples_split}")
    rows = np.asarray(rows, dtype=np.int64)
    if rows.size == 0:
        raise ValueError("cannot induce a tree over an empty group")
    group_errors = int(np.count_nonzero(failures[rows]))
    subset = tuple(sorted(set(int(i) for i in feature_subset)))

    def build(node_rows: np.ndarray, depth: int) -> Node:
        size = int(node_rows.size)
        errors = int(np.count_nonzero(failures[node_rows]))
        leaf = LeafNode(
            stats=ClusterStats(size=size, error_count=errors, group_error_count=group_errors),
            rows=node_rows,
        )
        if (
            depth >= max_depth
            or size < min_samples_split
            or errors == 0
            or errors == size
        ):
            return leaf
        found = best_split(features, failures, node_rows, subset)
        if found is None:
            return leaf
        predicate, _ = found
        go_left = features[node_rows, predicate.feature_index] < predicate.threshold
        return InternalNode(
            split=predicate,
            left=build(node_rows[go_left], depth + 1),
            right=build(node_rows[~go_left], depth + 1),
        )

    return DecisionTree(
        root=build(rows, 0),
        group_size=int(rows.size),
        group_error_count=group_errors,
        feature_subset=subset,
    )


def serialize(tree: DecisionTree) -> dict:
    """Nested JSON-ready document for the tree (the root node itself)."""

    def node_doc(node: Node) -> dict:
        if isinstance(node, LeafNode):
            s = node.stats
            return {
                "leaf": {
                    "size": s.size,
                    "errors": s.error_count,
                    "er": s.error_rate,
                    "ec": s.error_coverage,
                    "iv": s.importance_value,
                }
            }
        return {
            "split": {
                "feature": node.split.feature_index,
                "threshold": node.split.threshold,
            },
            "left": node_doc(node.left),
            "right": node_doc(node.right),
        }

    return node_doc(tree.root)


def _require_doc(condition: bool, message: str) -> None:
    if not condition:
        raise TreeDocumentError(message)


def _is_int(value) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def deserialize(doc: dict) -> DecisionTree:
    """Parse and validate a tree document back into a DecisionTree.

    Group totals are recovered by summing leaf counts. Validation is
    strict: unknown keys, negative counts, and er/ec/iv fields that do
    not reproduce exactly from the counts are all errors.
    """
    leaf_payloads: list[dict] = []

    def collect(node: dict) -> None:
        _require_doc(isinstance(node, dict), "tree node must be an object")
        if "leaf" in node:
            _require_doc(set(node) == {"leaf"}, f"unexpected keys in leaf node: {sorted(node)}")
            payload = node["leaf"]
            _require_doc(isinstance(payload, dict), "leaf payload must be an object")
            _require_doc(
                set(payload) == {"size", "errors", "er", "ec", "iv"},
                f"leaf payload keys must be size/errors/er/ec/iv, got {sorted(payload)}",
            )
            _require_doc(_is_int(payload["size"]), "leaf size must be an integer")
            _require_doc(_is_int(payload["errors"]), "leaf errors must be an integer")
            _require_doc(payload["size"] > 0, f"leaf size must be positive, got {payload['size']}")
            _require_doc(
                0 <= payload["errors"] <= payload["size"],
                f"leaf errors {payload['errors']} outside [0, {payload['size']}]",
            )
            leaf_payloads.append(payload)
            return
        _require_doc(
            set(node) == {"split", "left", "right"},
            f"internal node keys must be split/left/right, got {sorted(node)}",
        )
        split = node["split"]
        _require_doc(isinstance(split, dict), "split payload must be an object")
        _require_doc(
            set(split) == {"feature", "threshold"},
            f"split payload keys must be feature/threshold, got {sorted(split)}",
        )
        _require_doc(
            _is_int(split["feature"]) and split["feature"] >= 0,
            "split feature must be a non-negative integer",
        )
        _require_doc(
            isinstance(split["threshold"], (int, float)) and not isinstance(split["threshold"], bool),
            "split threshold must be a number",
        )
        collect(node["left"])
        collect(node["right"])

    collect(doc)
    group_size = sum(p["size"] for p in leaf_payloads)
    group_errors = sum(p["errors"] for p in leaf_payloads)

    def rebuild(node: dict) -> Node:
        if "leaf" in node:
            payload = node["leaf"]
            stats = ClusterStats(
                size=payload["size"],
                error_count=payload["errors"],
                group_error_count=group_errors,
            )
            for key, derived in (
                ("er", stats.error_rate),
                ("ec", stats.error_coverage),
                ("iv", stats.importance_value),
            ):
                recorded = payload[key]
                _require_doc(
                    isinstance(recorded, (int, float)) and not isinstance(recorded, bool),
                    f"leaf {key} must be a number",
                )
                _require_doc(
                    float(recorded) == derived,
                    f"leaf {key}={recorded!r} does not match value {derived!r} "
                    f"derived from counts",
                )
            return LeafNode(stats=stats)
        return InternalNode(
            split=SplitPredicate(
                feature_index=node["split"]["feature"],
                threshold=float(node["split"]["threshold"]),
            ),
            left=rebuild(node["left"]),
            right=rebuild(node["right"]),
        )

    return DecisionTree(root=rebuild(doc), group_size=group_size, group_error_count=group_errors)
