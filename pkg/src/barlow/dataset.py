"""Evaluation-bundle loading, validation, and label/prediction groupings.

A bundle directory holds everything one model evaluation produced:

    manifest.json       required; schema below
    features.bin        row-major little-endian float32, n_images x n_features
    records.csv         header ``image_id,true_label,predicted_label``
    classes.csv         header ``class_index,class_name``
    fmaps/              optional spatial feature maps (see barlow.viz)

manifest.json keys: ``version`` (must be 1), ``n_images``, ``n_features``,
``features_file``, ``records_file``, ``classes_file``, and optionally
``feature_maps_dir``. File paths are relative to the bundle directory.

Loading is strict: shape mismatches, non-finite feature values, malformed
rows, and labels missing from the class table are all load errors that name
the offending file (and row, where applicable). A loaded bundle is immutable;
its arrays are marked read-only.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

MANIFEST_VERSION = 1
MANIFEST_NAME = "manifest.json"


class BundleError(Exception):
    """Raised when a bundle directory fails validation on load."""


class Grouping(Enum):
    """How images are grouped into per-class subpopulations.

    LABEL groups by true label (failure modes of a class), PREDICTION groups
    by predicted label (failure modes behind a prediction).
    """

    LABEL = "label"
    PREDICTION = "prediction"


@dataclass(frozen=True)
class EvalRecord:
    """One evaluated image: identity, labels, and the failure indicator."""

    image_id: str
    true_label: int
    predicted_label: int

    @property
    def failed(self) -> bool:
        return self.true_label != self.predicted_label


@dataclass(frozen=True)
class DatasetBundle:
    """A loaded evaluation bundle.

    Attributes:
        root: bundle directory (for locating optional feature maps).
        features: (n_images, n_features) float32, read-only.
        records: per-row evaluation records, aligned with ``features`` rows.
        classes: class index -> class name.
        true_labels / predicted_labels / failures: column views of ``records``
            as read-only numpy arrays (failures is bool).
        feature_maps_dir: directory with spatial maps, or None.
    """

    root: Path
    features: np.ndarray
    records: tuple[EvalRecord, ...]
    classes: dict[int, str]
    true_labels: np.ndarray = field(repr=False, default=None)
    predicted_labels: np.ndarray = field(repr=False, default=None)
    failures: np.ndarray = field(repr=False, default=None)
    feature_maps_dir: Path | None = None

    @property
    def n_images(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    def group_rows(self, grouping: Grouping, class_index: int) -> np.ndarray:
        """Row indices of the grouping's subpopulation for ``class_index``.

        The result is sorted ascending and possibly empty; an empty grouping
        is legal (the analyzer reports it as "no data").
        """
        if class_index not in self.classes:
            raise KeyError(f"unknown class index {class_index}")
        labels = (
            self.true_labels if grouping is Grouping.LABEL else self.predicted_labels
        )
        return np.nonzero(labels == class_index)[0]


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise BundleError(message)


def _read_manifest(root: Path) -> dict:
    path = root / MANIFEST_NAME
    _require(path.is_file(), f"{MANIFEST_NAME}: missing from {root}")
    try:
        manifest = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise BundleError(f"{MANIFEST_NAME}: invalid JSON ({exc})") from exc
    _require(isinstance(manifest, dict), f"{MANIFEST_NAME}: top level must be an object")
    _require(
        manifest.get("version") == MANIFEST_VERSION,
        f"{MANIFEST_NAME}: unsupported version {manifest.get('version')!r} "
        f"(expected {MANIFEST_VERSION})",
    )
    for key in ("n_images", "n_features", "features_file", "records_file", "classes_file"):
        _require(key in manifest, f"{MANIFEST_NAME}: missing key {key!r}")
    for key in ("n_images", "n_features"):
        _require(
            isinstance(manifest[key], int) and manifest[key] >= 0,
            f"{MANIFEST_NAME}: {key} must be a non-negative integer",
        )
    return manifest


def _read_features(path: Path, n_images: int, n_features: int) -> np.ndarray:
    _require(path.is_file(), f"{path.name}: missing")
    raw = path.read_bytes()
    expected = n_images * n_features * 4
    _require(
        len(raw) == expected,
        f"{path.name}: expected {expected} bytes "
        f"({n_images} x {n_features} float32), found {len(raw)}",
    )
    values = np.frombuffer(raw, dtype="<f4").reshape(n_images, n_features)
    finite = np.isfinite(values)
    if not finite.all():
        bad_row = int(np.nonzero(~finite.all(axis=1))[0][0])
        raise BundleError(f"{path.name}: non-finite feature value at row {bad_row}")
    values = values.copy()  # decouple from the raw buffer
    values.setflags(write=False)
    return values


def _read_classes(path: Path) -> dict[int, str]:
    _require(path.is_file(), f"{path.name}: missing")
    classes: dict[int, str] = {}
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        _require(
            header == ["class_index", "class_name"],
            f"{path.name}: expected header 'class_index,class_name', found {header}",
        )
        for lineno, row in enumerate(reader, start=2):
            _require(len(row) == 2, f"{path.name}: row {lineno}: expected 2 columns")
            try:
                index = int(row[0])
            except ValueError:
                raise BundleError(
                    f"{path.name}: row {lineno}: class_index {row[0]!r} is not an integer"
                ) from None
            _require(index not in classes, f"{path.name}: row {lineno}: duplicate class {index}")
            classes[index] = row[1]
    _require(bool(classes), f"{path.name}: no classes defined")
    return classes


def _read_records(path: Path, n_images: int, classes: dict[int, str]) -> tuple[EvalRecord, ...]:
    _require(path.is_file(), f"{path.name}: missing")
    records: list[EvalRecord] = []
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        _require(
            header == ["image_id", "true_label", "predicted_label"],
            f"{path.name}: expected header 'image_id,true_label,predicted_label', "
            f"found {header}",
        )
        for lineno, row in enumerate(reader, start=2):
            _require(len(row) == 3, f"{path.name}: row {lineno}: expected 3 columns")
            image_id, true_raw, pred_raw = row
            try:
                true_label = int(true_raw)
                predicted_label = int(pred_raw)
            except ValueError:
                raise BundleError(
                    f"{path.name}: row {lineno}: labels must be integers, "
                    f"found {true_raw!r},{pred_raw!r}"
                ) from None
            for label in (true_label, predicted_label):
                _require(
                    label in classes,
                    f"{path.name}: row {lineno}: label {label} not in class table",
                )
            records.append(EvalRecord(image_id, true_label, predicted_label))
    _require(
        len(records) == n_images,
        f"{path.name}: expected {n_images} records, found {len(records)}",
    )
    return tuple(records)


def load_bundle(root: str | Path) -> DatasetBundle:
    """Load and validate a bundle directory.

    Raises:
        BundleError: on any structural or content problem; the message names
            the offending file and, for per-row problems, the row.
    """
    root = Path(root)
    _require(root.is_dir(), f"bundle directory {root} does not exist")
    manifest = _read_manifest(root)
    n_images = manifest["n_images"]
    n_features = manifest["n_features"]
    features = _read_features(root / manifest["features_file"], n_images, n_features)
    classes = _read_classes(root / manifest["classes_file"])
    records = _read_records(root / manifest["records_file"], n_images, classes)

    true_labels = np.array([r.true_label for r in records], dtype=np.int64)
    predicted_labels = np.array([r.predicted_label for r in records], dtype=np.int64)
    failures = true_labels != predicted_labels
    for arr in (true_labels, predicted_labels, failures):
        arr.setflags(write=False)

    feature_maps_dir = None
    if "feature_maps_dir" in manifest:
        feature_maps_dir = root / manifest["feature_maps_dir"]
        _require(
            feature_maps_dir.is_dir(),
            f"{MANIFEST_NAME}: feature_maps_dir {manifest['feature_maps_dir']!r} "
            "does not exist",
        )

    return DatasetBundle(
        root=root,
        features=features,
        records=records,
        classes=classes,
        true_labels=true_labels,
        predicted_labels=predicted_labels,
        failures=failures,
        feature_maps_dir=feature_maps_dir,
    )


def save_bundle(
    root: str | Path,
    features: np.ndarray,
    records: list[EvalRecord] | tuple[EvalRecord, ...],
    classes: dict[int, str],
    feature_maps_dir: str | None = None,
) -> Path:
    """Write a bundle directory in the canonical on-disk layout.

    ``features`` is converted to float32; values must be finite. When
    ``feature_maps_dir`` is given, the (created) directory is referenced
    from the manifest; populating it is the caller's job. Returns the
    bundle root.
    """
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    features = np.ascontiguousarray(features, dtype="<f4")
    if not np.isfinite(features).all():
        raise BundleError("features.bin: refusing to write non-finite feature values")
    if features.ndim != 2 or features.shape[0] != len(records):
        raise BundleError(
            f"features.bin: shape {features.shape} does not match {len(records)} records"
        )

    (root / "features.bin").write_bytes(features.tobytes())
    with (root / "records.csv").open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["image_id", "true_label", "predicted_label"])
        for record in records:
            writer.writerow([record.image_id, record.true_label, record.predicted_label])
    with (root / "classes.csv").open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["class_index", "class_name"])
        for index in sorted(classes):
            writer.writerow([index, classes[index]])

    manifest = {
        "version": MANIFEST_VERSION,
        "n_images": int(features.shape[0]),
        "n_features": int(features.shape[1]),
        "features_file": "features.bin",
        "records_file": "records.csv",
        "classes_file": "classes.csv",
    }
    if feature_maps_dir is not None:
        (root / feature_maps_dir).mkdir(parents=True, exist_ok=True)
        manifest["feature_maps_dir"] = feature_maps_dir
    (root / MANIFEST_NAME).write_text(json.dumps(manifest, indent=2) + "\n")
    return root
