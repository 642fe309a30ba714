"""End-to-end extraction: image directory -> evaluation bundle.

The image directory is ImageNet-style: one subdirectory per true class,
named by a class in the model's label space, with image files inside.
Class names map to logit indices through a class-name list (one name per
line, line number = class index); without one, the default name for index
``i`` is ``class_{i:04d}``.

Unreadable image files are skipped with a logged warning; everything else
is deterministic given fixed weights -- rows are sorted by image id, and
the model runs in eval mode under ``torch.no_grad``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch

from .backbone import Backbone, BackboneError, load_pixels
from .bundle_io import (
    ImageRecord,
    fmap_path,
    register_feature_maps,
    write_bundle,
    write_fmap,
)

log = logging.getLogger(__name__)

BATCH_SIZE = 8


class ExtractionError(Exception):
    """Raised when the image directory cannot be turned into a bundle."""


def default_class_names(n_classes: int) -> list[str]:
    return [f"class_{i:04d}" for i in range(n_classes)]


def load_class_names(path: str | Path, n_classes: int) -> list[str]:
    """Read one class name per line; must cover the model's label space."""
    names = Path(path).read_text().splitlines()
    names = [name.strip() for name in names if name.strip()]
    if len(names) != n_classes:
        raise ExtractionError(
            f"class-name list has {len(names)} entries, model has {n_classes} classes"
        )
    return names


@dataclass(frozen=True)
class SourceImage:
    """One readable image file: bundle row, id, class, and location."""

    image_id: str
    true_label: int
    path: Path


def scan_images(image_dir: str | Path, class_names: list[str]) -> list[SourceImage]:
    """Enumerate the directory's images in deterministic (sorted) order."""
    root = Path(image_dir)
    if not root.is_dir():
        raise ExtractionError(f"image directory not found: {root}")
    index = {name: i for i, name in enumerate(class_names)}
    sources = []
    for class_dir in sorted(p for p in root.iterdir() if p.is_dir()):
        if class_dir.name not in index:
            raise ExtractionError(
                f"directory {class_dir.name!r} is not a known class name"
            )
        label = index[class_dir.name]
        for file in sorted(p for p in class_dir.iterdir() if p.is_file()):
            sources.append(SourceImage(f"{class_dir.name}/{file.name}", label, file))
    if not sources:
        raise ExtractionError(f"no images found under {root}")
    return sources


def _batched(items: list, size: int):
    for start in range(0, len(items), size):
        yield items[start : start + size]


def extract_bundle(
    backbone: Backbone,
    image_dir: str | Path,
    out_dir: str | Path,
    class_names: list[str] | None = None,
) -> tuple[Path, list[SourceImage]]:
    """Run the model over a directory and write the bundle.

    Returns the bundle root and the list of images actually included
    (unreadable files are skipped with a warning), in row order.
    """
    names = class_names if class_names is not None else default_class_names(backbone.n_classes)
    sources = scan_images(image_dir, names)

    kept: list[SourceImage] = []
    rows: list[np.ndarray] = []
    predictions: list[int] = []
    with torch.no_grad():
        for batch in _batched(sources, BATCH_SIZE):
            pixels = []
            readable = []
            for source in batch:
                try:
                    pixels.append(load_pixels(source.path, backbone.input_size))
                except BackboneError as exc:
                    log.warning("skipping unreadable image %s: %s", source.path, exc)
                    continue
                readable.append(source)
            if not readable:
                continue
            stacked = torch.stack(pixels)
            feats = backbone.features(stacked)
            logits = backbone.model.fc(feats)
            kept.extend(readable)
            rows.append(feats.numpy().astype("<f4"))
            predictions.extend(int(i) for i in logits.argmax(dim=1))

    if not kept:
        raise ExtractionError(f"no readable images under {image_dir}")

    features = np.concatenate(rows, axis=0)
    records = [
        ImageRecord(source.image_id, source.true_label, predicted)
        for source, predicted in zip(kept, predictions)
    ]
    classes = {i: name for i, name in enumerate(names)}
    bundle_root = write_bundle(out_dir, features, records, classes)
    return bundle_root, kept


def export_feature_maps(
    backbone: Backbone,
    bundle_root: str | Path,
    sources: list[SourceImage],
    image_rows: list[int],
    feature_indices: list[int],
) -> list[Path]:
    """Write spatial maps for every requested (feature, image row) pair.

    ``sources`` must be the row-ordered image list the bundle was built
    from.  Registers the map directory in the manifest and returns the
    written paths.
    """
    for row in image_rows:
        if not 0 <= row < len(sources):
            raise ExtractionError(f"image row out of range [0, {len(sources)}): {row}")
    for feature in feature_indices:
        if not 0 <= feature < 2048:
            raise ExtractionError(f"feature index out of range [0, 2048): {feature}")

    written = []
    with torch.no_grad():
        for batch in _batched(sorted(set(image_rows)), BATCH_SIZE):
            pixels = torch.stack(
                [load_pixels(sources[row].path, backbone.input_size) for row in batch]
            )
            maps = backbone.feature_maps(pixels).numpy()
            for position, row in enumerate(batch):
                for feature in feature_indices:
                    path = fmap_path(bundle_root, feature, row)
                    write_fmap(path, maps[position, feature])
                    written.append(path)
    register_feature_maps(bundle_root)
    return written
