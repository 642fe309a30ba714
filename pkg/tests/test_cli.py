"""End-to-end command-line tests: synth -> analyze -> sweep -> heatmap.

The analyze/sweep commands must write byte-identical output to the
library entry points they wrap; errors must surface as clean messages
with non-zero exit codes, not tracebacks.
"""

from __future__ import annotations

import json

import numpy as np
import pytest
from click.testing import CliRunner

from barlow import rules, viz
from barlow.cli import main
from barlow.dataset import Grouping, load_bundle
from barlow.report import build_report, run_sweep
from barlow.rules import AnalysisConfig
from barlow.synth import SyntheticSpec, generate_suite


@pytest.fixture
def runner():
    return CliRunner()


SPEC_PAYLOAD = {
    "n_images": 80,
    "n_features": 6,
    "planted_feature": 2,
    "planted_threshold": 2.0,
    "p_high": 0.8,
    "p_low": 0.05,
    "class_index": 1,
    "class_name": "widget",
    "seed": 3,
}


# ---------------------------------------------------------------- synth


def test_synth_single_spec_writes_loadable_bundle(runner, tmp_path):
    spec_file = tmp_path / "spec.json"
    spec_file.write_text(json.dumps(SPEC_PAYLOAD))
    out = tmp_path / "bundle"

    result = runner.invoke(main, ["synth", "--spec", str(spec_file), "--out", str(out)])
    assert result.exit_code == 0, result.output
    assert "80 images, 6 features, 1 planted classes" in result.output

    bundle = load_bundle(out)
    features, records, classes = generate_suite([SyntheticSpec(**SPEC_PAYLOAD)])
    assert np.array_equal(bundle.features, features)
    assert bundle.classes == classes
    assert [r.image_id for r in bundle.records] == [r.image_id for r in records]

    planted = json.loads((out / "planted.json").read_text())
    assert planted["classes"] == [
        {
            "class_index": 1,
            "planted_feature": 2,
            "planted_threshold": 2.0,
            "p_high": 0.8,
            "p_low": 0.05,
            "seed": 3,
        }
    ]


def test_synth_suite_spec(runner, tmp_path):
    suite = {
        "suite": [
            SPEC_PAYLOAD,
            {**SPEC_PAYLOAD, "class_index": 4, "class_name": "gadget", "seed": 9},
        ]
    }
    spec_file = tmp_path / "suite.json"
    spec_file.write_text(json.dumps(suite))
    out = tmp_path / "bundle"

    result = runner.invoke(main, ["synth", "--spec", str(spec_file), "--out", str(out)])
    assert result.exit_code == 0, result.output
    assert "160 images, 6 features, 2 planted classes" in result.output

    bundle = load_bundle(out)
    assert set(bundle.classes) == {1, 4, 5}  # shared foil = max + 1
    assert len(json.loads((out / "planted.json").read_text())["classes"]) == 2


def test_synth_rejects_invalid_json(runner, tmp_path):
    spec_file = tmp_path / "broken.json"
    spec_file.write_text("{not json")
    result = runner.invoke(
        main, ["synth", "--spec", str(spec_file), "--out", str(tmp_path / "b")]
    )
    assert result.exit_code != 0
    assert "invalid JSON" in result.stderr


def test_synth_rejects_bad_spec_values(runner, tmp_path):
    spec_file = tmp_path / "bad.json"
    spec_file.write_text(json.dumps({**SPEC_PAYLOAD, "p_high": 1.5}))
    result = runner.invoke(
        main, ["synth", "--spec", str(spec_file), "--out", str(tmp_path / "b")]
    )
    assert result.exit_code != 0
    assert "p_high" in result.stderr


def test_synth_rejects_unknown_spec_field(runner, tmp_path):
    spec_file = tmp_path / "bad.json"
    spec_file.write_text(json.dumps({**SPEC_PAYLOAD, "surprise": 1}))
    result = runner.invoke(
        main, ["synth", "--spec", str(spec_file), "--out", str(tmp_path / "b")]
    )
    assert result.exit_code != 0
    assert "surprise" in result.stderr


# -------------------------------------------------------------- analyze


def test_analyze_writes_canonical_report_bytes(runner, planted_bundle_dir, tmp_path):
    out = tmp_path / "report.json"
    result = runner.invoke(
        main,
        [
            "analyze",
            "--manifest", str(planted_bundle_dir),
            "--grouping", "label",
            "--class-index", "3",
            "--out", str(out),
        ],
    )
    assert result.exit_code == 0, result.output
    assert f"report written to {out}" in result.output
    assert "Grouping label, class 3 (purse)" in result.output

    bundle = load_bundle(planted_bundle_dir)
    expected = build_report(
        bundle, rules.analyze_grouping(bundle, Grouping.LABEL, 3, AnalysisConfig())
    )
    assert out.read_bytes() == expected.canonical()


def test_analyze_accepts_class_alias_and_options(runner, planted_bundle_dir, tmp_path):
    out = tmp_path / "report.json"
    result = runner.invoke(
        main,
        [
            "analyze",
            "--manifest", str(planted_bundle_dir),
            "--grouping", "label",
            "--class", "5",
            "--k", "10",
            "--depth", "2",
            "--rho", "0.05",
            "--tau", "0.1",
            "--out", str(out),
        ],
    )
    assert result.exit_code == 0, result.output

    bundle = load_bundle(planted_bundle_dir)
    config = AnalysisConfig(k=10, max_depth=2, rho=0.05, tau=0.1)
    expected = build_report(
        bundle, rules.analyze_grouping(bundle, Grouping.LABEL, 5, config)
    )
    assert out.read_bytes() == expected.canonical()


def test_analyze_disable_excludes_features(runner, planted_bundle_dir, tmp_path):
    out = tmp_path / "report.json"
    result = runner.invoke(
        main,
        [
            "analyze",
            "--manifest", str(planted_bundle_dir),
            "--grouping", "label",
            "--class-index", "3",
            "--disable", "7,19",
            "--out", str(out),
        ],
    )
    assert result.exit_code == 0, result.output
    doc = json.loads(out.read_bytes())
    assert doc["config"]["disabled_features"] == [7, 19]
    assert all(score["feature"] not in (7, 19) for score in doc["selection"])


def test_analyze_unknown_class(runner, planted_bundle_dir, tmp_path):
    result = runner.invoke(
        main,
        [
            "analyze",
            "--manifest", str(planted_bundle_dir),
            "--grouping", "label",
            "--class-index", "42",
            "--out", str(tmp_path / "r.json"),
        ],
    )
    assert result.exit_code == 1
    assert "unknown class index 42" in result.stderr


def test_analyze_depth_out_of_range(runner, planted_bundle_dir, tmp_path):
    result = runner.invoke(
        main,
        [
            "analyze",
            "--manifest", str(planted_bundle_dir),
            "--grouping", "label",
            "--class-index", "3",
            "--depth", "4",
            "--out", str(tmp_path / "r.json"),
        ],
    )
    assert result.exit_code == 1
    assert "max_depth" in result.stderr


def test_analyze_disable_out_of_range(runner, planted_bundle_dir, tmp_path):
    result = runner.invoke(
        main,
        [
            "analyze",
            "--manifest", str(planted_bundle_dir),
            "--grouping", "label",
            "--class-index", "3",
            "--disable", "999",
            "--out", str(tmp_path / "r.json"),
        ],
    )
    assert result.exit_code == 1
    assert "disabled features out of range [0, 32)" in result.stderr


def test_analyze_disable_not_numeric(runner, planted_bundle_dir, tmp_path):
    result = runner.invoke(
        main,
        [
            "analyze",
            "--manifest", str(planted_bundle_dir),
            "--grouping", "label",
            "--class-index", "3",
            "--disable", "a,b",
            "--out", str(tmp_path / "r.json"),
        ],
    )
    assert result.exit_code == 2
    assert "comma-separated list of feature indices" in result.stderr


def test_analyze_missing_manifest_dir(runner, tmp_path):
    result = runner.invoke(
        main,
        [
            "analyze",
            "--manifest", str(tmp_path / "nope"),
            "--grouping", "label",
            "--class-index", "3",
            "--out", str(tmp_path / "r.json"),
        ],
    )
    assert result.exit_code == 2


def test_analyze_corrupt_manifest(runner, tmp_path):
    root = tmp_path / "bundle"
    root.mkdir()
    (root / "manifest.json").write_text("{}")
    result = runner.invoke(
        main,
        [
            "analyze",
            "--manifest", str(root),
            "--grouping", "label",
            "--class-index", "3",
            "--out", str(tmp_path / "r.json"),
        ],
    )
    assert result.exit_code == 1
    assert "manifest.json" in result.stderr


# ---------------------------------------------------------------- sweep


def test_sweep_both_groupings_writes_all_files(runner, planted_bundle_dir, tmp_path):
    out = tmp_path / "sweep"
    result = runner.invoke(
        main,
        [
            "sweep",
            "--manifest", str(planted_bundle_dir),
            "--grouping", "both",
            "--workers", "2",
            "--out", str(out),
        ],
    )
    assert result.exit_code == 0, result.output
    assert "analyzed 5 non-empty groups (6 total)" in result.output
    assert "label:" in result.output and "prediction:" in result.output

    expected_names = {
        "label_0003.json",
        "label_0005.json",
        "label_0006.json",
        "prediction_0003.json",
        "prediction_0005.json",
        "prediction_0006.json",
        "sweep.json",
        "sweep.csv",
    }
    assert {p.name for p in out.iterdir()} == expected_names

    bundle = load_bundle(planted_bundle_dir)
    summary = run_sweep(bundle, [Grouping.LABEL, Grouping.PREDICTION], AnalysisConfig())
    for name, payload in summary.files:
        assert (out / name).read_bytes() == payload


def test_sweep_single_grouping(runner, planted_bundle_dir, tmp_path):
    out = tmp_path / "sweep"
    result = runner.invoke(
        main,
        [
            "sweep",
            "--manifest", str(planted_bundle_dir),
            "--grouping", "prediction",
            "--out", str(out),
        ],
    )
    assert result.exit_code == 0, result.output
    names = {p.name for p in out.iterdir()}
    assert names == {
        "prediction_0003.json",
        "prediction_0005.json",
        "prediction_0006.json",
        "sweep.json",
        "sweep.csv",
    }


def test_sweep_rejects_zero_workers(runner, planted_bundle_dir, tmp_path):
    result = runner.invoke(
        main,
        [
            "sweep",
            "--manifest", str(planted_bundle_dir),
            "--grouping", "label",
            "--workers", "0",
            "--out", str(tmp_path / "s"),
        ],
    )
    assert result.exit_code == 1
    assert "workers must be >= 1" in result.stderr


# -------------------------------------------------------------- heatmap


def test_heatmap_writes_pgm(runner, tmp_path):
    fmap = viz.FeatureMap(np.array([[0.0, 1.0], [2.0, 4.0]]))
    fmap_file = tmp_path / "cell.fmap"
    viz.write_fmap(fmap_file, fmap)
    out = tmp_path / "heat.pgm"

    result = runner.invoke(
        main,
        [
            "heatmap",
            "--fmap", str(fmap_file),
            "--width", "4",
            "--height", "4",
            "--out", str(out),
        ],
    )
    assert result.exit_code == 0, result.output
    assert "wrote 4x4 heatmap" in result.output
    expected = viz.pgm_bytes(viz.upsample_bilinear(viz.normalize(fmap), 4, 4))
    assert out.read_bytes() == expected
    assert out.read_bytes().startswith(b"P5\n4 4\n255\n")


def test_heatmap_rejects_downscale(runner, tmp_path):
    fmap_file = tmp_path / "cell.fmap"
    viz.write_fmap(fmap_file, viz.FeatureMap(np.arange(16.0).reshape(4, 4)))
    result = runner.invoke(
        main,
        [
            "heatmap",
            "--fmap", str(fmap_file),
            "--width", "2",
            "--height", "2",
            "--out", str(tmp_path / "h.pgm"),
        ],
    )
    assert result.exit_code == 1
    assert "smaller" in result.stderr


def test_heatmap_rejects_garbage_file(runner, tmp_path):
    bad = tmp_path / "junk.fmap"
    bad.write_bytes(b"\x01\x02")
    result = runner.invoke(
        main,
        ["heatmap", "--fmap", str(bad), "--out", str(tmp_path / "h.pgm")],
    )
    assert result.exit_code == 1
    assert "junk.fmap" in result.stderr


# ------------------------------------------------------------- plumbing


def test_version_option(runner):
    result = runner.invoke(main, ["--version"])
    assert result.exit_code == 0
    assert "barlow, version 0.1.0" in result.output


def test_help_lists_commands(runner):
    result = runner.invoke(main, ["--help"])
    assert result.exit_code == 0
    for command in ("analyze", "sweep", "heatmap", "synth", "serve"):
        assert command in result.output
