"""Canonical JSON, report documents, captions, sweep determinism."""

import json

import pytest

from barlow.dataset import Grouping
from barlow.report import (
    build_report,
    canonical_json,
    format_float,
    mode_caption,
    render_text,
    run_sweep,
)
from barlow.rules import AnalysisConfig, analyze_grouping


# ---------------------------------------------------------------- canonical


def test_canonical_floats_17_digits():
    assert canonical_json(0.1) == b"0.10000000000000001"
    assert canonical_json(0.5) == b"0.5"
    assert canonical_json(1.0) == b"1"
    assert canonical_json(2.0002910494804382) == b"2.0002910494804382"


def test_canonical_primitives():
    assert canonical_json({"b": 1, "a": [True, False, None]}) == b'{"b":1,"a":[true,false,null]}'
    assert canonical_json((1, 2)) == b"[1,2]"


def test_canonical_preserves_insertion_order():
    doc = {"z": 1, "a": 2, "m": {"y": 1, "b": 2}}
    assert canonical_json(doc) == b'{"z":1,"a":2,"m":{"y":1,"b":2}}'


def test_canonical_escapes_non_ascii():
    assert canonical_json("café") == b'"caf\\u00e9"'
    assert canonical_json("tab\there") == b'"tab\\there"'
    assert canonical_json("emoji \U0001f40d") == b'"emoji \\ud83d\\udc0d"'


def test_canonical_output_parses_back():
    doc = {"name": "café", "values": [0.1, 1.0, -3], "flag": True}
    parsed = json.loads(canonical_json(doc))
    assert parsed["name"] == "café"
    assert parsed["values"][0] == 0.1


def test_canonical_rejects_bad_payloads():
    with pytest.raises(ValueError):
        canonical_json(float("nan"))
    with pytest.raises(ValueError):
        canonical_json(float("inf"))
    with pytest.raises(TypeError):
        canonical_json({1: "non-string key"})
    with pytest.raises(TypeError):
        canonical_json(object())


def test_format_float_round_trips():
    for value in (0.1, 1 / 3, 2.0002910494804382, 1e-17, 123456.789):
        assert float(format_float(value)) == value


# ------------------------------------------------------------------ caption


def test_mode_caption_reference_constants():
    assert (
        mode_caption(0.3085, 0.4179) == "error rate increases to 0.4179 (+10.94%)"
    )
    assert (
        mode_caption(0.2093, 0.3184) == "error rate increases to 0.3184 (+10.91%)"
    )


def test_mode_caption_directions():
    assert mode_caption(0.5, 0.25) == "error rate decreases to 0.2500 (-25.00%)"
    assert mode_caption(0.5, 0.5) == "error rate stays at 0.5000 (+0.00%)"


# ------------------------------------------------------------------ reports


def test_report_document_shape(planted_bundle):
    result = analyze_grouping(planted_bundle, Grouping.LABEL, 3, AnalysisConfig())
    doc = build_report(planted_bundle, result).doc
    assert list(doc) == [
        "tool",
        "grouping",
        "class_index",
        "class_name",
        "config",
        "status",
        "group",
        "selection",
        "tree",
        "aler",
        "gain",
        "top_leaf",
        "modes",
    ]
    assert doc["status"] == "ok"
    assert doc["group"]["size"] == result.group_size
    assert len(doc["selection"]) == result.config.k
    mode = doc["modes"][0]
    assert mode["caption"].startswith("error rate increases to")
    assert len(mode["top_rows"]) <= result.config.top_count
    assert mode["top_image_ids"] == [
        planted_bundle.records[r].image_id for r in mode["top_rows"]
    ]


def test_report_numbers_recompute_from_counts(planted_bundle):
    result = analyze_grouping(planted_bundle, Grouping.LABEL, 3, AnalysisConfig())
    doc = build_report(planted_bundle, result).doc
    group = doc["group"]
    assert group["base_error_rate"] == group["errors"] / group["size"]
    for mode in doc["modes"]:
        assert mode["er"] == mode["errors"] / mode["size"]
        assert mode["ec"] == mode["errors"] / group["errors"]
        assert mode["iv"] == mode["er"] * mode["ec"]


def test_report_bytes_are_deterministic(planted_bundle):
    config = AnalysisConfig(max_depth=2)
    first = build_report(
        planted_bundle, analyze_grouping(planted_bundle, Grouping.LABEL, 3, config)
    ).canonical()
    second = build_report(
        planted_bundle, analyze_grouping(planted_bundle, Grouping.LABEL, 3, config)
    ).canonical()
    assert first == second
    json.loads(first)  # canonical bytes are valid JSON


def test_no_data_report(planted_bundle):
    foil = max(planted_bundle.classes)
    result = analyze_grouping(planted_bundle, Grouping.LABEL, foil, AnalysisConfig())
    doc = build_report(planted_bundle, result).doc
    assert doc["status"] == "no_data"
    assert doc["group"] == {"size": 0, "errors": 0}
    assert "tree" not in doc and "modes" not in doc
    assert "No data" in render_text(doc)


def test_render_text_mentions_key_numbers(planted_bundle):
    result = analyze_grouping(planted_bundle, Grouping.LABEL, 3, AnalysisConfig())
    text = build_report(planted_bundle, result).text()
    assert "Grouping label, class 3 (purse)" in text
    assert f"base error rate {result.base_error_rate:.4f}" in text
    assert result.modes[0].path in text
    assert "error rate increases to" in text


# -------------------------------------------------------------------- sweep


def test_sweep_is_worker_independent(planted_bundle):
    config = AnalysisConfig()
    groupings = [Grouping.LABEL, Grouping.PREDICTION]
    single = run_sweep(planted_bundle, groupings, config, workers=1)
    pooled = run_sweep(planted_bundle, groupings, config, workers=7)
    assert single.files == pooled.files


def test_sweep_files_and_rows(planted_bundle):
    summary = run_sweep(
        planted_bundle, [Grouping.LABEL], AnalysisConfig(), workers=2
    )
    names = [name for name, _ in summary.files]
    assert names == [
        "label_0003.json",
        "label_0005.json",
        "label_0006.json",
        "sweep.json",
        "sweep.csv",
    ]
    doc = summary.doc
    assert [row["class_index"] for row in doc["rows"]] == [3, 5, 6]
    foil_row = doc["rows"][-1]
    assert foil_row["status"] == "no_data"
    assert "ber" not in foil_row
    agg = doc["aggregates"]["label"]
    assert agg["classes"] == 3
    assert agg["analyzed"] == 2
    assert agg["valid_leaf_fraction"] == 1.0
    assert agg["mean_gain"] > 0


def test_sweep_csv_shape(planted_bundle):
    summary = run_sweep(planted_bundle, [Grouping.LABEL], AnalysisConfig())
    csv_payload = dict(summary.files)["sweep.csv"].decode()
    lines = csv_payload.strip().split("\n")
    assert lines[0].startswith("grouping,class_index,class_name,status")
    assert len(lines) == 4  # header + three classes
    foil_line = lines[-1]
    assert ",no_data," in foil_line


def test_sweep_report_files_match_direct_analysis(planted_bundle):
    config = AnalysisConfig()
    summary = run_sweep(planted_bundle, [Grouping.LABEL], config)
    direct = build_report(
        planted_bundle, analyze_grouping(planted_bundle, Grouping.LABEL, 3, config)
    ).canonical()
    assert dict(summary.files)["label_0003.json"] == direct
