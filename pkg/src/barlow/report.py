"""Analysis reports: canonical JSON documents, text summaries, sweeps.

Reports are rendered through one canonical JSON serializer so that equal
analyses produce byte-identical documents everywhere (CLI files, HTTP
responses, sweep outputs): insertion-ordered keys, compact separators,
ASCII-escaped strings, and floats at 17 significant digits (enough to
round-trip IEEE doubles exactly).

Every derived number in a report sits next to the raw counts it came
from (leaf sizes and error counts, group totals), so a reader can

re-verify er/ec/iv/aler from the document alone.
"""

from __future__ import annotations

import math
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from barlow import __version__, rules
from barlow.dataset import DatasetBundle, Grouping
from barlow.rules import AnalysisConfig, AnalysisResult
from barlow.selection import top_activating
from barlow.tree import serialize

FLOAT_DIGITS = ".17g"


def format_float(value: float) -> str:
    """Canonical decimal form of a finite float (17 significant digits)."""
    if math.isnan(value) or math.isinf(value):
        raise ValueError(f"non-finite value {value!r} cannot be serialized")
    return format(value, FLOAT_DIGITS)


def _render(obj, out: list[str]) -> None:
    if obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif obj is None:
        out.append("null")
    elif isinstance(obj, float):
        out.append(format_float(obj))
    elif isinstance(obj, int):
        out.append(repr(obj))
    elif isinstance(obj, str):
        out.append(_escape_string(obj))
    elif isinstance(obj, dict):
        out.append("{")
        first = True
        for key, value in obj.items():
            if not isinstance(key, str):
                raise TypeError(f"object keys must be strings, got {key!r}")
            if not first:
                out.append(",")
            first = False
            out.append(_escape_string(key))
            out.append(":")
            _render(value, out)
        out.append("}")
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for i, value in enumerate(obj):
            if i:
                out.append(",")
            _render(value, out)
        out.append("]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__} canonically")


_STRING_ESCAPES = {
    '"': '\\"',
    "\\": "\\\\",
    "\b": "\\b",
    "\f": "\\f",
    "\n": "\\n",
    "\r": "\\r",
    "\t": "\\t",
}


def _escape_string(text: str) -> str:
    parts = ['"']
    for ch in text:
        if ch in _STRING_ESCAPES:
            parts.append(_STRING_ESCAPES[ch])
        elif ch < " " or ord(ch) > 0x7E:
            code = ord(ch)
            if code > 0xFFFF:  # non-BMP -> surrogate pair, as JSON requires
                code -= 0x10000
                parts.append(f"\\u{0xD800 + (code >> 10):04x}")
                parts.append(f"\\u{0xDC00 + (code & 0x3FF):04x}")
            else:
                parts.append(f"\\u{code:04x}")
        else:
            parts.append(ch)
    parts.append('"')
    return "".join(parts)


def canonical_json(doc) -> bytes:
    """Deterministic ASCII JSON bytes for a report document."""
    out: list[str] = []
    _render(doc, out)
    return "".join(out).encode("ascii")


def mode_caption(base_error_rate: float, error_rate: float) -> str:
    """E.g. "error rate increases to 0.4179 (+10.94%)".

    The parenthetical is the change against the group baseline in
    percentage points, signed, two decimals.
    """
    delta_points = (error_rate - base_error_rate) * 100.0
    if error_rate > base_error_rate:
        verb = "increases to"
    elif error_rate < base_error_rate:
        verb = "decreases to"
    else:
        verb = "stays at"
    return f"error rate {verb} {error_rate:.4f} ({delta_points:+.2f}%)"


def _leaf_doc(summary: rules.LeafSummary) -> dict:
    stats = summary.stats
    return {
        "path": summary.path,
        "size": stats.size,
        "errors": stats.error_count,
        "er": stats.error_rate,
        "ec": stats.error_coverage,
        "iv": stats.importance_value,
        "valid": summary.valid,
    }


@dataclass(frozen=True)
class AnalysisReport:
    """One analysis as a JSON-ready document."""

    doc: dict

    def canonical(self) -> bytes:
        return canonical_json(self.doc)

    def text(self) -> str:
        return render_text(self.doc)


def build_report(bundle: DatasetBundle, result: AnalysisResult) -> AnalysisReport:
    """Assemble the canonical document for one analysis result."""
    config = result.config
    doc: dict = {
        "tool": {"name": "barlow", "version": __version__},
        "grouping": result.grouping.value,
        "class_index": result.class_index,
        "class_name": result.class_name,
        "config": {
            "k": config.k,
            "max_depth": config.max_depth,
            "rho": config.rho,
            "tau": config.tau,
            "min_samples_split": config.min_samples_split,
            "disabled_features": list(config.disabled_features),
            "top_count": config.top_count,
        },
        "status": "ok" if result.has_data else "no_data",
        "group": {"size": result.group_size, "errors": result.group_error_count},
    }
    if not result.has_data:
        return AnalysisReport(doc=doc)

    ber = result.base_error_rate
    doc["group"]["base_error_rate"] = ber
    doc["selection"] = [
        {
            "feature": score.feature_index,
            "mi_bits": score.mi_bits,
            "threshold": score.best_threshold,
        }
        for score in result.feature_scores
    ]
    doc["tree"] = serialize(result.tree)
    doc["aler"] = result.aler
    doc["gain"] = result.gain
    doc["top_leaf"] = _leaf_doc(result.top_leaf)

    modes_doc = []
    for mode in result.modes:
        stats = mode.stats
        feature_for_panel = mode.route[-1][0].feature_index if mode.route else None
        if feature_for_panel is not None:
            top_rows = top_activating(
                bundle.features, mode.rows, feature_for_panel, config.top_count
            )
        else:
            top_rows = list(mode.rows[: config.top_count])
        modes_doc.append(
            {
                "rank": mode.rank,
                "path": mode.path,
                "size": stats.size,
                "errors": stats.error_count,
                "er": stats.error_rate,
                "ec": stats.error_coverage,
                "iv": stats.importance_value,
                "caption": mode_caption(ber, stats.error_rate),
                "feature": feature_for_panel,
                "top_rows": top_rows,
                "top_image_ids": [bundle.records[r].image_id for r in top_rows],
            }
        )
    doc["modes"] = modes_doc
    return AnalysisReport(doc=doc)


def render_text(doc: dict) -> str:
    """Human-readable summary of a report document."""
    lines = [
        f"Grouping {doc['grouping']}, class {doc['class_index']} ({doc['class_name']})"
    ]
    group = doc["group"]
    if doc["status"] == "no_data":
        lines.append("No data: the group is empty.")
        return "\n".join(lines) + "\n"

    config = doc["config"]
    lines.append(
        f"Group: {group['size']} images, {group['errors']} failures, "
        f"base error rate {group['base_error_rate']:.4f}"
    )
    lines.append(
        f"ALER {doc['aler']:.4f}, gain {doc['gain']:+.4f} "
        f"(depth {config['max_depth']}, top {len(doc['selection'])} features by MI)"
    )
    modes = doc["modes"]
    lines.append(
        f"Failure modes (er > ber + {config['rho']:.2f}, ec > {config['tau']:.2f}):"
    )
    if not modes:
        lines.append("  (none passed the validity filter)")
    for mode in modes:
        lines.append(f"  {mode['rank']}. {mode['path']}")
        lines.append(
            f"     {mode['size']}/{group['size']} images, {mode['errors']} failures; "
            f"{mode['caption']}; coverage {mode['ec']:.4f}; importance {mode['iv']:.4f}"
        )
    top = doc["top_leaf"]
    flag = "valid" if top["valid"] else "not valid"
    lines.append(f"Top leaf by importance: {top['path']} (iv {top['iv']:.4f}, {flag})")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class SweepSummary:
    """All per-class analyses for a bundle plus aggregate statistics."""

    results: tuple[AnalysisResult, ...]
    doc: dict
    files: tuple[tuple[str, bytes], ...]


def _report_filename(grouping: Grouping, class_index: int) -> str:
    return f"{grouping.value}_{class_index:04d}.json"


def _aggregate(results: list[AnalysisResult]) -> dict:
    analyzed = [r for r in results if r.has_data]
    agg: dict = {"classes": len(results), "analyzed": len(analyzed)}
    if analyzed:
        gains = [r.gain for r in analyzed]
        agg["mean_gain"] = sum(gains) / len(gains)
        agg["median_gain"] = float(statistics.median(gains))
        agg["valid_leaf_fraction"] = rules.valid_leaf_fraction(analyzed)
    return agg


def run_sweep(
    bundle: DatasetBundle,
    groupings: list[Grouping],
    config: AnalysisConfig | None = None,
    workers: int = 1,
) -> SweepSummary:
    """Analyze every class under each grouping.

    Work is farmed out to a thread pool, but tasks are pure and results
    are assembled in a fixed (grouping, class) order by this thread, so
    the output bytes do not depend on ``workers``.
    """
    config = config or AnalysisConfig()
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    tasks = [
        (grouping, class_index)
        for grouping in groupings
        for class_index in sorted(bundle.classes)
    ]

    def run(task: tuple[Grouping, int]) -> AnalysisResult:
        grouping, class_index = task
        return rules.analyze_grouping(bundle, grouping, class_index, config)

    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(run, tasks))

    files: list[tuple[str, bytes]] = []
    rows = []
    for result in results:
        report = build_report(bundle, result)
        filename = _report_filename(result.grouping, result.class_index)
        files.append((filename, report.canonical()))
        row: dict = {
            "grouping": result.grouping.value,
            "class_index": result.class_index,
            "class_name": result.class_name,
            "status": "ok" if result.has_data else "no_data",
            "size": result.group_size,
            "errors": result.group_error_count,
            "report_file": filename,
        }
        if result.has_data:
            row["ber"] = result.base_error_rate
            row["aler"] = result.aler
            row["gain"] = result.gain
            row["top_leaf"] = _leaf_doc(result.top_leaf)
            row["modes"] = len(result.modes)
        rows.append(row)

    by_grouping: dict[str, list[AnalysisResult]] = {g.value: [] for g in groupings}
    for result in results:
        by_grouping[result.grouping.value].append(result)

    doc = {
        "tool": {"name": "barlow", "version": __version__},
        "config": {
            "k": config.k,
            "max_depth": config.max_depth,
            "rho": config.rho,
            "tau": config.tau,
            "min_samples_split": config.min_samples_split,
            "disabled_features": list(config.disabled_features),
            "top_count": config.top_count,
        },
        "groupings": [g.value for g in groupings],
        "rows": rows,
        "aggregates": {
            value: _aggregate(group_results)
            for value, group_results in by_grouping.items()
        },
    }
    files.append(("sweep.json", canonical_json(doc)))
    files.append(("sweep.csv", _sweep_csv(rows)))
    return SweepSummary(results=tuple(results), doc=doc, files=tuple(files))


def _sweep_csv(rows: list[dict]) -> bytes:
    """Flat per-class table mirroring sweep.json's rows."""
    header = "grouping,class_index,class_name,status,size,errors,ber,aler,gain,top_iv,valid,modes"
    lines = [header]
    for row in rows:
        name = row["class_name"]
        if any(ch in name for ch in ',"\n'):
            name = '"' + name.replace('"', '""') + '"'
        cells = [
            row["grouping"],
            str(row["class_index"]),
            name,
            row["status"],
            str(row["size"]),
            str(row["errors"]),
        ]
        if row["status"] == "ok":
            cells += [
                format_float(row["ber"]),
                format_float(row["aler"]),
                format_float(row["gain"]),
                format_float(row["top_leaf"]["iv"]),
                str(row["top_leaf"]["valid"]).lower(),
                str(row["modes"]),
            ]
        else:
            cells += ["", "", "", "", "", ""]
        lines.append(",".join(cells))
    return ("\n".join(lines) + "\n").encode("utf-8")
