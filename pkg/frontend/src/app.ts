// ============================================================================
// Browser entry point: binds the controller to the page.
//
// Layout: a grouping/class sidebar, the report view (summary, disabled
// chips, tree, modes), and a feature panel (top-activating tiles with red
// heatmap overlays).  All behaviour lives in controller.ts; this file
// only moves markup into the DOM and translates events into controller
// calls.
// ============================================================================

import { ExplorerController } from "./controller.js";
import { parsePgm, tintRed } from "./heatmap.js";
import {
  renderBanner,
  renderChips,
  renderClassList,
  renderErrorPanel,
  renderFeaturePanelFor,
  renderGroupSummary,
  renderModes,
  renderTree,
} from "./render.js";
import { rawLiteral } from "./rawjson.js";
import type { Grouping, TreeNode } from "./types.js";
import { isSplitNode } from "./types.js";

function el(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (node === null) throw new Error(`missing #${id}`);
  return node;
}

function nodeAt(root: TreeNode, nodeId: string): TreeNode | null {
  let current = root;
  for (const step of nodeId.split(".").slice(1)) {
    if (!isSplitNode(current)) return null;
    if (step === "left") current = current.left;
    else if (step === "right") current = current.right;
    else return null;
  }
  return current;
}

const explorer = new ExplorerController((input, init) =>
  window.fetch(input, init)
);
const client = explorer.client;

let panelToken = 0;

function paintView(): void {
  const state = explorer.state;
  el("banner").innerHTML = renderBanner(state.banner);
  if (state.groupings !== null) {
    el("classes").innerHTML = renderClassList(
      state.groupings,
      state.grouping,
      state.classIndex
    );
  }
  el("chips").innerHTML = renderChips(state.disabled);
  if (state.report === null) {
    el("summary").innerHTML = "";
    el("tree").innerHTML = renderErrorPanel("no report loaded yet");
    el("modes").innerHTML = "";
    return;
  }
  try {
    el("summary").innerHTML = renderGroupSummary(state.report);
    el("tree").innerHTML = renderTree(state.report, state.selectedNode);
    el("modes").innerHTML = renderModes(state.report);
  } catch (error) {
    el("tree").innerHTML = renderErrorPanel(
      `malformed report: ${String(error)}`
    );
    el("modes").innerHTML = "";
  }
}

async function paintPanel(feature: number): Promise<void> {
  const token = (panelToken += 1);
  const state = explorer.state;
  if (state.classIndex === null) return;
  const top = await client.featureTop(
    feature,
    state.grouping,
    state.classIndex,
    state.params.top_count
  );
  if (token !== panelToken) return;

  const overlays = new Map<number, "ok" | "missing">();
  const pgms = new Map<number, ReturnType<typeof parsePgm>>();
  const activations = new Map<number, string>();
  if (top !== null) {
    top.doc.rows.forEach((row, i) => {
      activations.set(row, rawLiteral(top.raw, `activations.${i}`));
    });
    const fetched = await Promise.all(
      top.doc.rows.map(async (row) => {
        const bytes = await client.heatmap(feature, row);
        return [row, bytes] as const;
      })
    );
    if (token !== panelToken) return;
    for (const [row, bytes] of fetched) {
      if (bytes === null) {
        overlays.set(row, "missing");
        continue;
      }
      try {
        pgms.set(row, parsePgm(bytes));
        overlays.set(row, "ok");
      } catch {
        overlays.set(row, "missing");
      }
    }
  }

  el("panel").innerHTML = renderFeaturePanelFor(
    feature,
    top === null ? null : top.doc,
    overlays,
    activations
  );
  for (const canvas of el("panel").querySelectorAll<HTMLCanvasElement>(
    "canvas.overlay"
  )) {
    const row = Number(canvas.dataset["row"]);
    const gray = pgms.get(row);
    if (gray === undefined) continue;
    const overlay = tintRed(gray);
    canvas.width = overlay.width;
    canvas.height = overlay.height;
    const ctx = canvas.getContext("2d");
    if (ctx !== null) {
      ctx.putImageData(
        new ImageData(overlay.rgba, overlay.width, overlay.height),
        0,
        0
      );
    }
  }
}

async function refresh(): Promise<void> {
  paintView();
}

function wireEvents(): void {
  el("grouping").addEventListener("change", (event) => {
    const value = (event.target as HTMLSelectElement).value as Grouping;
    const classIndex = explorer.state.classIndex;
    if (classIndex !== null) {
      void explorer.selectClass(value, classIndex).then(refresh);
    } else {
      explorer.state.grouping = value;
      void refresh();
    }
  });

  el("classes").addEventListener("click", (event) => {
    const row = (event.target as HTMLElement).closest<HTMLElement>(".class-row");
    if (row === null) return;
    const classIndex = Number(row.dataset["classIndex"]);
    void explorer.selectClass(explorer.state.grouping, classIndex).then(refresh);
  });

  el("depth").addEventListener("change", (event) => {
    const depth = Number((event.target as HTMLSelectElement).value);
    void explorer.setParams({ max_depth: depth }).then(refresh);
  });

  el("tree").addEventListener("click", (event) => {
    const target = event.target as HTMLElement;
    const disableBtn = target.closest<HTMLElement>(".disable-btn");
    if (disableBtn !== null) {
      const feature = Number(disableBtn.dataset["feature"]);
      void explorer.toggleDisable(feature).then(refresh);
      return;
    }
    const node = target.closest<HTMLElement>(".node");
    const report = explorer.state.report;
    if (node === null || report === null || report.doc.tree === null) return;
    const nodeId = node.dataset["nodeId"];
    if (nodeId === undefined) return;
    explorer.state.selectedNode = nodeId;
    paintView();
    const selected = nodeAt(report.doc.tree, nodeId);
    if (selected !== null && isSplitNode(selected)) {
      void paintPanel(selected.split.feature);
    }
  });

  el("modes").addEventListener("click", (event) => {
    const item = (event.target as HTMLElement).closest<HTMLElement>(".mode");
    if (item === null) return;
    void paintPanel(Number(item.dataset["feature"]));
  });

  el("chips").addEventListener("click", (event) => {
    const remove = (event.target as HTMLElement).closest<HTMLElement>(
      ".chip-remove"
    );
    if (remove === null) return;
    void explorer.toggleDisable(Number(remove.dataset["feature"])).then(refresh);
  });

  el("banner").addEventListener("click", (event) => {
    if ((event.target as HTMLElement).closest(".retry-btn") !== null) {
      void explorer.runAnalyze().then(refresh);
    }
  });
}

async function start(): Promise<void> {
  wireEvents();
  try {
    await explorer.init();
  } catch (error) {
    explorer.state.banner = `could not reach the analysis server: ${String(error)}`;
  }
  paintView();
}

void start();
