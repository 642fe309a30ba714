"""Writers for the evaluation-bundle directory layout.

A bundle is the hand-off point between the model side (this package) and
the analysis side: a directory containing

    manifest.json       version, row/column counts, relative file names
    features.bin        row-major float32 little-endian, one row per image
    records.csv         header ``image_id,true_label,predicted_label``
    classes.csv         header ``class_index,class_name``
    fmaps/              optional spatial maps, one file per (feature, image)

A spatial map file is ``struct('<II')``-packed ``(height, width)`` followed
by ``height * width`` float32 little-endian values in row-major order, and
lives at ``<feature_maps_dir>/f<feature>/i<row>.fmap``, where ``row`` is the
image's zero-based position in ``records.csv``.

This module only produces and amends bundles; the analysis side owns the
reader.  The two implementations meet at the bytes.
"""

from __future__ import annotations

import csv
import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

MANIFEST_VERSION = 1
MANIFEST_NAME = "manifest.json"
FEATURE_MAPS_DIR = "fmaps"
FMAP_HEADER = struct.Struct("<II")


class BundleWriteError(Exception):
    """Raised when a bundle cannot be written or amended."""


@dataclass(frozen=True)
class ImageRecord:
    """One evaluated image: its id and true/predicted class indices."""

    image_id: str
    true_label: int
    predicted_label: int


def write_bundle(
    root: str | Path,
    features: np.ndarray,
    records: list[ImageRecord],
    classes: dict[int, str],
) -> Path:
    """Write a complete bundle directory; returns its root path."""
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)

    features = np.ascontiguousarray(features, dtype="<f4")
    if features.ndim != 2 or features.shape[0] != len(records):
        raise BundleWriteError(
            f"features shape {features.shape} does not match {len(records)} records"
        )
    if not np.isfinite(features).all():
        raise BundleWriteError("refusing to write non-finite feature values")

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
    (root / MANIFEST_NAME).write_text(json.dumps(manifest, indent=2) + "\n")
    return root


def fmap_path(bundle_root: str | Path, feature_index: int, image_row: int) -> Path:
    """Canonical location of one spatial map inside a bundle."""
    return Path(bundle_root) / FEATURE_MAPS_DIR / f"f{feature_index}" / f"i{image_row}.fmap"


def write_fmap(path: str | Path, values: np.ndarray) -> Path:
    """Write one spatial map file; returns its path."""
    values = np.ascontiguousarray(values, dtype="<f4")
    if values.ndim != 2:
        raise BundleWriteError(f"a spatial map must be 2-D, got shape {values.shape}")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    height, width = values.shape
    path.write_bytes(FMAP_HEADER.pack(height, width) + values.tobytes())
    return path


def read_fmap(path: str | Path) -> np.ndarray:
    """Read one spatial map file back into a float32 array."""
    raw = Path(path).read_bytes()
    if len(raw) < FMAP_HEADER.size:
        raise BundleWriteError(f"{path}: truncated spatial map header")
    height, width = FMAP_HEADER.unpack_from(raw)
    body = np.frombuffer(raw, dtype="<f4", offset=FMAP_HEADER.size)
    if body.size != height * width:
        raise BundleWriteError(
            f"{path}: expected {height * width} values, found {body.size}"
        )
    return body.reshape(height, width).copy()


def register_feature_maps(bundle_root: str | Path) -> None:
    """Point the bundle manifest at its spatial-map directory."""
    root = Path(bundle_root)
    path = root / MANIFEST_NAME
    if not path.is_file():
        raise BundleWriteError(f"{MANIFEST_NAME}: missing from {root}")
    manifest = json.loads(path.read_text())
    (root / FEATURE_MAPS_DIR).mkdir(parents=True, exist_ok=True)
    if manifest.get("feature_maps_dir") != FEATURE_MAPS_DIR:
        manifest["feature_maps_dir"] = FEATURE_MAPS_DIR
        path.write_text(json.dumps(manifest, indent=2) + "\n")


def read_records(bundle_root: str | Path) -> list[ImageRecord]:
    """Read a bundle's records back, in row order."""
    path = Path(bundle_root) / "records.csv"
    records = []
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["image_id", "true_label", "predicted_label"]:
            raise BundleWriteError(f"{path.name}: unexpected header {header}")
        for row in reader:
            records.append(ImageRecord(row[0], int(row[1]), int(row[2])))
    return records
