"""Command-line interface for the extraction side.

``barlow-extract features`` turns an image directory plus model weights
into an evaluation bundle; ``fmaps`` adds spatial maps for chosen
(feature, image) pairs to an existing bundle; ``attack`` runs the feature
attack on one image and writes the perturbed PNG plus its activation
trace.  The bundle directory is the hand-off to the analysis tool.
"""

from __future__ import annotations

import csv
import logging
from pathlib import Path

import click
import numpy as np
import torch
from PIL import Image

from .attack import AttackConfig, AttackError, feature_attack
from .backbone import (
    DEFAULT_INPUT_SIZE,
    FEATURE_WIDTH,
    Backbone,
    BackboneError,
    load_backbone,
    load_pixels,
)
from .bundle_io import BundleWriteError, read_records
from .extract import (
    ExtractionError,
    SourceImage,
    default_class_names,
    export_feature_maps,
    extract_bundle,
    load_class_names,
)


def _parse_indices(raw: str, what: str) -> list[int]:
    try:
        values = [int(part) for part in raw.split(",") if part.strip() != ""]
    except ValueError:
        raise click.BadParameter(f"expected a comma-separated list of {what}")
    if not values:
        raise click.BadParameter(f"expected a comma-separated list of {what}")
    return values


def _load(weights: Path, input_size: int) -> Backbone:
    try:
        return load_backbone(weights, input_size=input_size)
    except BackboneError as exc:
        raise click.ClickException(str(exc))


@click.group()
@click.version_option(version="0.1.0", prog_name="barlow-extract")
def main():
    """Extract model features, spatial maps, and feature attacks."""
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(message)s")


@main.command()
@click.option("--images", "image_dir", required=True, type=click.Path(exists=True, file_okay=False, path_type=Path), help="Image directory with one subdirectory per class.")
@click.option("--weights", required=True, type=click.Path(path_type=Path), help="Model state-dict file.")
@click.option("--out", "out_dir", required=True, type=click.Path(path_type=Path), help="Bundle directory to write.")
@click.option("--classes", "classes_file", type=click.Path(exists=True, dir_okay=False, path_type=Path), default=None, help="Class-name list, one per line (line number = class index).")
@click.option("--input-size", default=DEFAULT_INPUT_SIZE, show_default=True, help="Square input resolution (multiple of 32).")
def features(image_dir: Path, weights: Path, out_dir: Path, classes_file: Path | None, input_size: int):
    """Run the model over a directory and write an evaluation bundle."""
    backbone = _load(weights, input_size)
    try:
        names = (
            load_class_names(classes_file, backbone.n_classes)
            if classes_file is not None
            else None
        )
        bundle_root, kept = extract_bundle(backbone, image_dir, out_dir, class_names=names)
    except (ExtractionError, BundleWriteError, BackboneError) as exc:
        raise click.ClickException(str(exc))
    click.echo(
        f"wrote bundle with {len(kept)} images, {FEATURE_WIDTH} features to {bundle_root}"
    )


@main.command()
@click.option("--images", "image_dir", required=True, type=click.Path(exists=True, file_okay=False, path_type=Path), help="Image directory the bundle was extracted from.")
@click.option("--weights", required=True, type=click.Path(path_type=Path), help="Model state-dict file.")
@click.option("--bundle", "bundle_dir", required=True, type=click.Path(exists=True, file_okay=False, path_type=Path), help="Bundle directory to add spatial maps to.")
@click.option("--features", "feature_list", required=True, help="Comma-separated feature indices.")
@click.option("--rows", "row_list", default=None, help="Comma-separated image rows (default: all).")
@click.option("--input-size", default=DEFAULT_INPUT_SIZE, show_default=True, help="Square input resolution (multiple of 32).")
def fmaps(image_dir: Path, weights: Path, bundle_dir: Path, feature_list: str, row_list: str | None, input_size: int):
    """Export spatial maps for chosen (feature, image) pairs."""
    backbone = _load(weights, input_size)
    feature_indices = _parse_indices(feature_list, "feature indices")
    try:
        records = read_records(bundle_dir)
    except (BundleWriteError, OSError, ValueError, IndexError) as exc:
        raise click.ClickException(f"could not read bundle records: {exc}")
    sources = [
        SourceImage(record.image_id, record.true_label, image_dir / record.image_id)
        for record in records
    ]
    rows = (
        _parse_indices(row_list, "image rows")
        if row_list is not None
        else list(range(len(sources)))
    )
    try:
        written = export_feature_maps(backbone, bundle_dir, sources, rows, feature_indices)
    except (ExtractionError, BundleWriteError, BackboneError) as exc:
        raise click.ClickException(str(exc))
    click.echo(f"wrote {len(written)} spatial maps to {bundle_dir}")


@main.command()
@click.option("--images", "image_dir", required=True, type=click.Path(exists=True, file_okay=False, path_type=Path), help="Image directory.")
@click.option("--weights", required=True, type=click.Path(path_type=Path), help="Model state-dict file.")
@click.option("--image-id", required=True, help="Image id (class-dir/filename) to attack.")
@click.option("--feature", required=True, type=int, help="Feature index to ascend.")
@click.option("--out", "out_dir", required=True, type=click.Path(path_type=Path), help="Directory for the attack PNG and trace CSV.")
@click.option("--epsilon", default=500.0, show_default=True, help="L2 budget in raw pixel units.")
@click.option("--step-size", default=1.0, show_default=True, help="Step length per iteration.")
@click.option("--iterations", default=500, show_default=True, help="Number of ascent iterations.")
@click.option("--input-size", default=DEFAULT_INPUT_SIZE, show_default=True, help="Square input resolution (multiple of 32).")
def attack(image_dir: Path, weights: Path, image_id: str, feature: int, out_dir: Path, epsilon: float, step_size: float, iterations: int, input_size: int):
    """Push one feature's activation up within a pixel-space budget."""
    backbone = _load(weights, input_size)
    image_path = image_dir / image_id
    if not image_path.is_file():
        raise click.ClickException(f"unknown image id {image_id!r} under {image_dir}")
    try:
        config = AttackConfig(
            feature_index=feature,
            epsilon=epsilon,
            step_size=step_size,
            iterations=iterations,
        )
        pixels = load_pixels(image_path, backbone.input_size)
        result = feature_attack(backbone.activation_fn(feature), pixels, config)
    except (AttackError, BackboneError) as exc:
        raise click.ClickException(str(exc))

    out_dir.mkdir(parents=True, exist_ok=True)
    stem = f"{image_id.replace('/', '_')}_f{feature}"
    png_path = out_dir / f"{stem}.png"
    raw = result.image.round().clamp(0, 255).to(torch.uint8)
    Image.fromarray(np.ascontiguousarray(raw.permute(1, 2, 0).numpy())).save(png_path)

    trace_path = out_dir / f"{stem}_trace.csv"
    with trace_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iteration", "activation", "delta_l2"])
        writer.writerow([0, f"{result.trace[0]:.17g}", "0"])
        for i, (activation, delta) in enumerate(
            zip(result.trace[1:], result.delta_norms), start=1
        ):
            writer.writerow([i, f"{activation:.17g}", f"{delta:.17g}"])

    click.echo(
        f"activation {result.initial_activation:.6g} -> {result.final_activation:.6g} "
        f"in {len(result.delta_norms)} iterations; wrote {png_path}"
    )


if __name__ == "__main__":
    main()
