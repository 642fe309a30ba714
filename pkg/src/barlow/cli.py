"""Command-line interface.

    barlow analyze  --manifest DIR --grouping label --class-index 3 --out r.json
    barlow sweep    --manifest DIR --grouping both --out sweep_dir/
    barlow heatmap  --fmap f.fmap --out h.pgm
    barlow synth    --spec spec.json --out bundle_dir/
    barlow serve    --manifest DIR --port 8000 [--static dist/]

Commands are thin wrappers: every analysis goes through the same
rules/report code the HTTP service uses, so a written report and the
corresponding /api/analyze response are byte-identical. Files are
written atomically (temp file + rename).
"""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click

from barlow import __version__, rules, viz
from barlow.dataset import BundleError, Grouping, load_bundle, save_bundle
from barlow.report import build_report, run_sweep
from barlow.rules import AnalysisConfig
from barlow.synth import SyntheticSpec, generate_suite


def _write_atomic(path: Path, payload: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(payload)
    os.replace(tmp, path)


def _parse_disable(_, __, value: str | None) -> tuple[int, ...]:
    if not value:
        return ()
    try:
        return tuple(int(part) for part in value.split(",") if part.strip() != "")
    except ValueError:
        raise click.BadParameter("expected a comma-separated list of feature indices")


def _load(manifest: str):
    try:
        return load_bundle(manifest)
    except BundleError as exc:
        raise click.ClickException(str(exc)) from exc


def _config(k, depth, rho, tau, min_samples_split, disable) -> AnalysisConfig:
    try:
        return AnalysisConfig(
            k=k,
            max_depth=depth,
            rho=rho,
            tau=tau,
            min_samples_split=min_samples_split,
            disabled_features=disable,
        )
    except ValueError as exc:
        raise click.ClickException(str(exc)) from exc


def _analysis_options(fn):
    fn = click.option("--k", type=int, default=20, show_default=True,
                      help="Features kept by MI ranking.")(fn)
    fn = click.option("--depth", type=int, default=1, show_default=True,
                      help="Tree depth cap (1-3).")(fn)
    fn = click.option("--rho", type=float, default=0.1, show_default=True,
                      help="Error-rate margin over the group baseline.")(fn)
    fn = click.option("--tau", type=float, default=0.2, show_default=True,
                      help="Minimum error coverage for a mode.")(fn)
    fn = click.option("--min-samples-split", type=int, default=2, show_default=True,
                      help="Smallest node the tree may split.")(fn)
    fn = click.option("--disable", callback=_parse_disable, default=None,
                      help="Comma-separated feature indices to exclude.")(fn)
    return fn


@click.group()
@click.version_option(version=__version__, prog_name="barlow")
def main() -> None:
    """Mine human-readable failure modes from evaluation bundles."""


@main.command()
@click.option("--manifest", required=True, type=click.Path(exists=True, file_okay=False),
              help="Bundle directory (contains manifest.json).")
@click.option("--grouping", required=True, type=click.Choice(["label", "prediction"]))
@click.option("--class-index", "--class", "class_index", required=True, type=int)
@_analysis_options
@click.option("--out", required=True, type=click.Path(dir_okay=False),
              help="Canonical JSON report path.")
def analyze(manifest, grouping, class_index, k, depth, rho, tau,
            min_samples_split, disable, out) -> None:
    """Mine failure modes for one class and write the report."""
    bundle = _load(manifest)
    if class_index not in bundle.classes:
        raise click.ClickException(f"unknown class index {class_index}")
    config = _config(k, depth, rho, tau, min_samples_split, disable)
    if any(not 0 <= f < bundle.n_features for f in config.disabled_features):
        raise click.ClickException(
            f"disabled features out of range [0, {bundle.n_features})"
        )
    result = rules.analyze_grouping(bundle, Grouping(grouping), class_index, config)
    report = build_report(bundle, result)
    _write_atomic(Path(out), report.canonical())
    click.echo(report.text(), nl=False)
    click.echo(f"report written to {out}")


@main.command()
@click.option("--manifest", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--grouping", required=True, type=click.Choice(["label", "prediction", "both"]))
@_analysis_options
@click.option("--workers", type=int, default=4, show_default=True,
              help="Analysis threads (output bytes are worker-independent).")
@click.option("--out", required=True, type=click.Path(file_okay=False),
              help="Directory for per-class reports and the sweep summary.")
def sweep(manifest, grouping, k, depth, rho, tau, min_samples_split,
          disable, workers, out) -> None:
    """Analyze every class, write per-class reports plus sweep.json/csv."""
    bundle = _load(manifest)
    config = _config(k, depth, rho, tau, min_samples_split, disable)
    if any(not 0 <= f < bundle.n_features for f in config.disabled_features):
        raise click.ClickException(
            f"disabled features out of range [0, {bundle.n_features})"
        )
    groupings = (
        [Grouping.LABEL, Grouping.PREDICTION]
        if grouping == "both"
        else [Grouping(grouping)]
    )
    if workers < 1:
        raise click.ClickException(f"workers must be >= 1, got {workers}")
    summary = run_sweep(bundle, groupings, config, workers=workers)
    out_dir = Path(out)
    for name, payload in summary.files:
        _write_atomic(out_dir / name, payload)
    analyzed = [r for r in summary.results if r.has_data]
    click.echo(
        f"analyzed {len(analyzed)} non-empty groups "
        f"({len(summary.results)} total) into {out_dir}"
    )
    for value, agg in summary.doc["aggregates"].items():
        if "valid_leaf_fraction" in agg:
            click.echo(
                f"  {value}: mean gain {agg['mean_gain']:+.4f}, "
                f"valid-leaf fraction {agg['valid_leaf_fraction']:.3f}"
            )
        else:
            click.echo(f"  {value}: no non-empty groups")


@main.command()
@click.option("--fmap", "fmap_file", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="Feature-map file (uint32 H,W header + float32 grid).")
@click.option("--width", type=int, default=224, show_default=True)
@click.option("--height", type=int, default=224, show_default=True)
@click.option("--out", required=True, type=click.Path(dir_okay=False),
              help="Output PGM path.")
def heatmap(fmap_file, width, height, out) -> None:
    """Render one feature map to a grayscale heatmap (binary PGM)."""
    try:
        fmap = viz.read_fmap(fmap_file)
        rendered = viz.upsample_bilinear(viz.normalize(fmap), height, width)
    except (viz.FeatureMapError, ValueError) as exc:
        raise click.ClickException(str(exc)) from exc
    _write_atomic(Path(out), viz.pgm_bytes(rendered))
    click.echo(f"wrote {rendered.width}x{rendered.height} heatmap to {out}")


@main.command()
@click.option("--spec", "spec_file", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="JSON recipe: one class object or {\"suite\": [...]}.")
@click.option("--out", required=True, type=click.Path(file_okay=False),
              help="Bundle directory to create.")
def synth(spec_file, out) -> None:
    """Generate a synthetic bundle with planted failure modes."""
    try:
        raw = json.loads(Path(spec_file).read_text())
    except json.JSONDecodeError as exc:
        raise click.ClickException(f"{spec_file}: invalid JSON ({exc})") from exc
    payloads = raw["suite"] if isinstance(raw, dict) and "suite" in raw else [raw]
    try:
        specs = [SyntheticSpec(**payload) for payload in payloads]
        features, records, classes = generate_suite(specs)
    except (TypeError, ValueError) as exc:
        raise click.ClickException(f"{spec_file}: {exc}") from exc
    save_bundle(out, features, records, classes)
    planted = {
        "classes": [
            {
                "class_index": spec.class_index,
                "planted_feature": spec.planted_feature,
                "planted_threshold": spec.planted_threshold,
                "p_high": spec.p_high,
                "p_low": spec.p_low,
                "seed": spec.seed,
            }
            for spec in specs
        ]
    }
    (Path(out) / "planted.json").write_text(json.dumps(planted, indent=2) + "\n")
    click.echo(
        f"wrote bundle with {features.shape[0]} images, "
        f"{features.shape[1]} features, {len(specs)} planted classes to {out}"
    )


@main.command()
@click.option("--manifest", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--static", "static_dir", type=click.Path(exists=True, file_okay=False),
              default=None, help="Directory of frontend assets to serve at /.")
def serve(manifest, host, port, static_dir) -> None:
    """Serve the analysis API (and optionally a frontend) over HTTP."""
    import uvicorn

    from barlow.service import create_app

    bundle = _load(manifest)
    app = create_app(bundle, static_dir=static_dir)
    click.echo(f"serving bundle {manifest} on http://{host}:{port}")
    uvicorn.run(app, host=host, port=port, log_level="info")


if __name__ == "__main__":
    sys.exit(main())
