// ============================================================================
// HTML renderers: state in, markup out.
//
// Every renderer is a pure function of server-provided data, which keeps
// the view testable without a DOM.  Metric values are emitted through
// rawLiteral(), i.e. with the exact bytes the server sent; the only string
// manipulation applied to a metric is escapeHtml, which never alters
// digits.  Leaf validity is read off the report's modes list by exact
// stats equality -- the client never re-derives a validity decision.
// ============================================================================

import type {
  AnalysisReport,
  ClassEntry,
  FailureMode,
  FeatureTopResponse,
  GroupingsResponse,
  Grouping,
  LeafStats,
  TreeNode,
} from "./types.js";
import { isSplitNode } from "./types.js";
import type { ReportEnvelope } from "./state.js";
import { rawLiteral } from "./rawjson.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

/** Pull the signed percent badge out of a mode caption, if present. */
export function badgeFromCaption(caption: string): string | null {
  const match = /\(([+-]\d+(?:\.\d+)?%)\)\s*$/.exec(caption);
  return match ? match[1]! : null;
}

/** The mode whose stats equal this leaf's, or null. */
export function modeForLeaf(modes: FailureMode[], leaf: LeafStats): FailureMode | null {
  for (const mode of modes) {
    if (
      mode.size === leaf.size &&
      mode.errors === leaf.errors &&
      mode.er === leaf.er &&
      mode.ec === leaf.ec &&
      mode.iv === leaf.iv
    ) {
      return mode;
    }
  }
  return null;
}

function metric(env: ReportEnvelope, path: string): string {
  return `<span class="metric" data-path="${escapeHtml(path)}">${escapeHtml(
    rawLiteral(env.raw, path)
  )}</span>`;
}

function leafHtml(
  env: ReportEnvelope,
  leaf: LeafStats,
  nodeId: string,
  rawPath: string,
  selected: string | null
): string {
  const mode = modeForLeaf(env.doc.modes, leaf);
  const classes = ["node", "leaf"];
  if (mode !== null) classes.push("valid");
  if (nodeId === selected) classes.push("selected");
  const badge = mode === null ? null : badgeFromCaption(mode.caption);
  const badgeHtml =
    badge === null ? "" : `<span class="badge">${escapeHtml(badge)}</span>`;
  const rankHtml =
    mode === null ? "" : `<span class="rank">mode #${mode.rank}</span>`;
  return (
    `<div class="${classes.join(" ")}" data-node-id="${escapeHtml(nodeId)}">` +
    `<div class="leaf-head">${rankHtml}${badgeHtml}</div>` +
    `<div class="leaf-stats">` +
    `<span>${metric(env, `${rawPath}.size`)} rows</span>` +
    `<span>${metric(env, `${rawPath}.errors`)} errors</span>` +
    `</div>` +
    `<div class="leaf-metrics">` +
    `<span>ER ${metric(env, `${rawPath}.er`)}</span>` +
    `<span>EC ${metric(env, `${rawPath}.ec`)}</span>` +
    `<span>IV ${metric(env, `${rawPath}.iv`)}</span>` +
    `</div>` +
    `</div>`
  );
}

function nodeHtml(
  env: ReportEnvelope,
  node: TreeNode,
  nodeId: string,
  rawPath: string,
  selected: string | null
): string {
  if (!isSplitNode(node)) {
    return leafHtml(env, node.leaf, nodeId, `${rawPath}.leaf`, selected);
  }
  const feature = node.split.feature;
  const classes = ["node", "split"];
  if (nodeId === selected) classes.push("selected");
  const predicate =
    `feature[${feature}] &lt; ` + metric(env, `${rawPath}.split.threshold`);
  return (
    `<div class="${classes.join(" ")}" data-node-id="${escapeHtml(nodeId)}" ` +
    `data-feature="${feature}">` +
    `<div class="node-head">` +
    `<span class="predicate">${predicate}</span>` +
    `<button type="button" class="disable-btn" data-feature="${feature}">disable</button>` +
    `</div>` +
    `<div class="branch"><span class="branch-label">yes</span>` +
    nodeHtml(env, node.left, `${nodeId}.left`, `${rawPath}.left`, selected) +
    `</div>` +
    `<div class="branch"><span class="branch-label">no</span>` +
    nodeHtml(env, node.right, `${nodeId}.right`, `${rawPath}.right`, selected) +
    `</div>` +
    `</div>`
  );
}

export function renderTree(env: ReportEnvelope, selected: string | null): string {
  if (env.doc.status === "no_data" || env.doc.tree === null) {
    return `<p class="empty">No rows in this group; nothing to split.</p>`;
  }
  return nodeHtml(env, env.doc.tree, "root", "tree", selected);
}

export function renderGroupSummary(env: ReportEnvelope): string {
  const doc = env.doc;
  const name = escapeHtml(doc.class_name);
  const head =
    `<h2>${escapeHtml(doc.grouping)} / class ${doc.class_index} (${name})</h2>`;
  if (doc.status === "no_data") {
    return head + `<p class="empty">This group contains no images.</p>`;
  }
  return (
    head +
    `<div class="summary-metrics">` +
    `<span>${metric(env, "group.size")} images</span>` +
    `<span>${metric(env, "group.errors")} failures</span>` +
    `<span>BER ${metric(env, "group.base_error_rate")}</span>` +
    `<span>ALER ${metric(env, "aler")}</span>` +
    `<span>gain ${metric(env, "gain")}</span>` +
    `</div>`
  );
}

export function renderModes(env: ReportEnvelope): string {
  const modes = env.doc.modes;
  if (modes.length === 0) {
    return `<p class="empty">No failure mode passed the validity filter.</p>`;
  }
  const items = modes.map((mode, i) => {
    const badge = badgeFromCaption(mode.caption);
    const badgeHtml =
      badge === null ? "" : `<span class="badge">${escapeHtml(badge)}</span>`;
    return (
      `<li class="mode" data-rank="${mode.rank}" data-feature="${mode.feature}">` +
      `<span class="mode-path">${escapeHtml(mode.path)}</span>` +
      badgeHtml +
      `<span class="mode-caption">${escapeHtml(mode.caption)}</span>` +
      `<span class="mode-metrics">` +
      `ER ${metric(env, `modes.${i}.er`)} · ` +
      `EC ${metric(env, `modes.${i}.ec`)} · ` +
      `IV ${metric(env, `modes.${i}.iv`)}` +
      `</span>` +
      `</li>`
    );
  });
  return `<ol class="modes">${items.join("")}</ol>`;
}

export function renderChips(disabled: readonly number[]): string {
  if (disabled.length === 0) {
    return `<span class="empty">no disabled features</span>`;
  }
  return disabled
    .map(
      (f) =>
        `<span class="chip" data-feature="${f}">feature[${f}]` +
        `<button type="button" class="chip-remove" data-feature="${f}" ` +
        `aria-label="re-enable feature ${f}">×</button></span>`
    )
    .join("");
}

export function renderClassList(
  doc: GroupingsResponse,
  grouping: Grouping,
  selected: number | null
): string {
  const rows = doc.classes.map((entry: ClassEntry) => {
    const size = grouping === "label" ? entry.label_size : entry.prediction_size;
    const errors =
      grouping === "label" ? entry.label_errors : entry.prediction_errors;
    const classes = ["class-row"];
    if (entry.index === selected) classes.push("selected");
    return (
      `<li class="${classes.join(" ")}" data-class-index="${entry.index}">` +
      `<span class="class-name">${escapeHtml(entry.name)}</span>` +
      `<span class="class-counts">${size} images · ${errors} failures</span>` +
      `</li>`
    );
  });
  return `<ul class="classes">${rows.join("")}</ul>`;
}

export interface PanelTile {
  imageId: string;
  row: number;
  /** Raw activation literal, when the server reported one. */
  activation: string | null;
  /** Whether a heatmap overlay was fetched for this tile. */
  overlay: "ok" | "missing";
}

export function renderFeaturePanel(feature: number, tiles: PanelTile[]): string {
  const head = `<h3>feature[${feature}]</h3>`;
  if (tiles.length === 0) {
    return head + `<p class="empty">No activating images reported.</p>`;
  }
  const cells = tiles.map((tile) => {
    const classes = ["tile"];
    if (tile.overlay === "missing") classes.push("placeholder");
    const overlayHtml =
      tile.overlay === "ok"
        ? `<canvas class="overlay" data-row="${tile.row}" data-feature="${feature}"></canvas>`
        : `<div class="overlay-missing">no heatmap</div>`;
    const activationHtml =
      tile.activation === null
        ? ""
        : `<span class="activation">${escapeHtml(tile.activation)}</span>`;
    return (
      `<figure class="${classes.join(" ")}" data-row="${tile.row}">` +
      overlayHtml +
      `<figcaption>${escapeHtml(tile.imageId)}${activationHtml}</figcaption>` +
      `</figure>`
    );
  });
  return head + `<div class="tiles">${cells.join("")}</div>`;
}

export function renderFeaturePanelFor(
  feature: number,
  top: FeatureTopResponse | null,
  overlays: ReadonlyMap<number, "ok" | "missing">,
  activationLiterals: ReadonlyMap<number, string>
): string {
  if (top === null) {
    return (
      `<h3>feature[${feature}]</h3>` +
      `<p class="empty">No visualization data for this feature.</p>`
    );
  }
  const tiles: PanelTile[] = top.rows.map((row, i) => ({
    imageId: top.image_ids[i] ?? `row ${row}`,
    row,
    activation: activationLiterals.get(row) ?? null,
    overlay: overlays.get(row) ?? "missing",
  }));
  return renderFeaturePanel(feature, tiles);
}

export function renderBanner(message: string | null): string {
  if (message === null) return "";
  return (
    `<div class="banner" role="alert">` +
    `<span>${escapeHtml(message)}</span>` +
    `<button type="button" class="retry-btn">retry</button>` +
    `</div>`
  );
}

export function renderErrorPanel(message: string): string {
  return `<div class="error-panel">${escapeHtml(message)}</div>`;
}
