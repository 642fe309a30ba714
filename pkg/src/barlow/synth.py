"""Synthetic evaluation bundles with planted failure modes, plus oracles.

The generator plants a single ground-truth failure rule per class: rows
whose activation of ``planted_feature`` falls below ``planted_threshold``
fail with probability ``p_high``, all other rows with ``p_low``. Every
other feature is pure noise, so the planted rule is the unique mode a
correct miner should recover. Failures are encoded in the records the
same way a real evaluation would produce them: a failing row's predicted
label is a foil class, a passing row predicts its own class.

Randomness comes from numpy's PCG64 generator seeded per spec — a named
algorithm with a stable cross-platform stream, so a (spec, seed) pair
always yields the same bundle. Draw order is fixed: the full activation
matrix first, then one failure uniform per row.

The oracle_* functions are deliberately independent re-implementations
of the estimators (plain Python loops, naive entropy arithmetic, no
shared helpers with the main code path); the test suite uses them as
ground truth for the fast implementations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from barlow.dataset import EvalRecord


@dataclass(frozen=True)
class SyntheticSpec:
    """Recipe for one planted class.

    Attributes:
        n_images: rows generated for this class.
        n_features: width of the activation matrix.
        planted_feature: column carrying the signal.
        planted_threshold: activation cut; rows strictly below it are the
            planted failure mode.
        p_high: failure probability below the threshold (the mode).
        p_low: failure probability at or above the threshold.
        class_index / class_name: identity of the class.
        foil_class_index: predicted label for failing rows; defaults to
            class_index + 1 (or one past the suite's largest class).
        value_low / value_high: uniform activation range, default [0, 4).
        seed: RNG seed for this class's stream.
    """

    n_images: int
    n_features: int
    planted_feature: int
    planted_threshold: float
    p_high: float
    p_low: float
    class_index: int = 0
    class_name: str = "synthetic"
    foil_class_index: int | None = None
    value_low: float = 0.0
    value_high: float = 4.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_images < 1:
            raise ValueError("n_images must be >= 1")
        if self.n_features < 1:
            raise ValueError("n_features must be >= 1")
        if not 0 <= self.planted_feature < self.n_features:
            raise ValueError(
                f"planted_feature {self.planted_feature} outside [0, {self.n_features})"
            )
        for name in ("p_high", "p_low"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {p}")
        if not self.value_low < self.value_high:
            raise ValueError("value_low must be < value_high")
        if self.foil_class_index is not None and self.foil_class_index == self.class_index:
            raise ValueError("foil class must differ from the class itself")

    def resolved_foil(self, default: int | None = None) -> int:
        if self.foil_class_index is not None:
            return self.foil_class_index
        return self.class_index + 1 if default is None else default


def generate(
    spec: SyntheticSpec,
) -> tuple[np.ndarray, list[EvalRecord], dict[int, str]]:
    """One single-class bundle: (features, records, classes).

    Features come back float32 exactly as they would load from disk, so
    threshold sidedness is decided on the stored values.
    """
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    features = rng.uniform(
        spec.value_low, spec.value_high, size=(spec.n_images, spec.n_features)
    ).astype(np.float32)
    below = features[:, spec.planted_feature].astype(np.float64) < spec.planted_threshold
    fail_probability = np.where(below, spec.p_high, spec.p_low)
    failed = rng.random(spec.n_images) < fail_probability

    foil = spec.resolved_foil()
    records = [
        EvalRecord(
            image_id=f"synth-{spec.class_index}-{i:05d}",
            true_label=spec.class_index,
            predicted_label=foil if failed[i] else spec.class_index,
        )
        for i in range(spec.n_images)
    ]
    classes = {spec.class_index: spec.class_name}
    if foil not in classes:
        classes[foil] = f"foil-{foil}"
    return features, records, classes


def generate_suite(
    specs: list[SyntheticSpec],
) -> tuple[np.ndarray, list[EvalRecord], dict[int, str]]:
    """Stack several planted classes into one multi-class bundle.

    All specs must agree on n_features and use distinct class indices.
    Specs without an explicit foil share one synthetic foil class just
    past the largest class index, keeping every real class's groupings
    clean of cross-class noise.
    """
    if not specs:
        raise ValueError("suite needs at least one spec")
    widths = {spec.n_features for spec in specs}
    if len(widths) != 1:
        raise ValueError(f"specs disagree on n_features: {sorted(widths)}")
    indices = [spec.class_index for spec in specs]
    if len(set(indices)) != len(indices):
        raise ValueError("specs must use distinct class indices")

    default_foil = max(indices) + 1
    blocks: list[np.ndarray] = []
    records: list[EvalRecord] = []
    classes: dict[int, str] = {}
    for spec in specs:
        classes[spec.class_index] = spec.class_name
    for spec in specs:
        rng = np.random.Generator(np.random.PCG64(spec.seed))
        features = rng.uniform(
            spec.value_low, spec.value_high, size=(spec.n_images, spec.n_features)
        ).astype(np.float32)
        below = (
            features[:, spec.planted_feature].astype(np.float64) < spec.planted_threshold
        )
        failed = rng.random(spec.n_images) < np.where(below, spec.p_high, spec.p_low)
        foil = spec.resolved_foil(default_foil)
        if foil not in classes:
            classes[foil] = f"foil-{foil}"
        blocks.append(features)
        records.extend(
            EvalRecord(
                image_id=f"synth-{spec.class_index}-{i:05d}",
                true_label=spec.class_index,
                predicted_label=foil if failed[i] else spec.class_index,
            )
            for i in range(spec.n_images)
        )
    return np.vstack(blocks), records, classes


# --------------------------------------------------------------------------
# Oracles: independent slow-path estimators used as test ground truth.
# --------------------------------------------------------------------------


def _oracle_entropy(error_count: int, total: int) -> float:
    # Minority-count form, matching the documented tie-break contract:
    # complementary counts hash to the same float, so mathematically
    # tied candidates tie exactly and resolve to the lowest threshold.
    if total == 0 or error_count == 0 or error_count == total:
        return 0.0
    minority = min(error_count, total - error_count)
    p = minority / total
    q = (total - minority) / total
    return -p * math.log(p, 2) - q * math.log(q, 2)


def oracle_best_split(values, failures) -> tuple[float, float] | None:
    """Exhaustive best binary split: (threshold, gain_bits), or None.

    Scans every boundary between consecutive distinct sorted values,
    replacing the incumbent only on strictly greater gain (so ties keep
    the lowest threshold). Returns None for constant or trivial columns.
    """
    pairs = sorted(zip([float(v) for v in values], [bool(f) for f in failures]))
    n = len(pairs)
    if n < 2:
        return None
    total_errors = sum(1 for _, flag in pairs if flag)
    parent = _oracle_entropy(total_errors, n)
    best: tuple[float, float] | None = None  # (gain, threshold)
    errors_left = 0
    for i in range(n - 1):
        if pairs[i][1]:
            errors_left += 1
        lo, hi = pairs[i][0], pairs[i + 1][0]
        if lo == hi:
            continue
        n_left = i + 1
        n_right = n - n_left
        errors_right = total_errors - errors_left
        # conditional term accumulated symmetrically (a + b == b + a in
        # IEEE arithmetic), so mirrored candidates tie bit-for-bit
        conditional = (n_left / n) * _oracle_entropy(errors_left, n_left) + (
            n_right / n
        ) * _oracle_entropy(errors_right, n_right)
        gain = parent - conditional
        if best is None or gain > best[0]:
            threshold = (lo + hi) / 2
            if threshold <= lo:
                threshold = hi
            best = (gain, threshold)
    if best is None:
        return None
    return best[1], best[0]


def oracle_mi(values, failures) -> float:
    """MI estimate as best-binary-split gain; 0.0 for constant columns."""
    best = oracle_best_split(values, failures)
    return 0.0 if best is None else best[1]


def oracle_aler(leaf_counts, group_error_count: int) -> float:
    """ALER from (size, error_count) leaf pairs, naive float arithmetic."""
    if group_error_count == 0:
        return 0.0
    total = 0.0
    for size, errors in leaf_counts:
        if size <= 0:
            raise ValueError("leaf size must be positive")
        total += (errors / size) * (errors / group_error_count)
    return total
