// ============================================================================
// Explorer state: everything the UI knows, in one plain object.
//
// The state is deliberately dumb -- it stores server responses and request
// parameters, never derived metrics.  Reports are cached by their exact
// request body, so re-enabling a feature restores the earlier report
// without another round trip, and the request log records every HTTP
// exchange so any toggle sequence can be replayed and audited.
// ============================================================================

import type {
  AnalysisReport,
  AnalyzeBody,
  Grouping,
  GroupingsResponse,
  TreeNode,
} from "./types.js";
import { isSplitNode } from "./types.js";
import type { RawLiteralMap } from "./rawjson.js";

/** A parsed report plus the response bytes it came from. */
export interface ReportEnvelope {
  doc: AnalysisReport;
  rawText: string;
  raw: RawLiteralMap;
}

export interface RequestLogEntry {
  method: string;
  path: string;
  body: string | null;
  status: number;
  responseText: string | null;
}

export interface AnalysisParams {
  k: number;
  max_depth: number;
  rho: number;
  tau: number;
  min_samples_split: number;
  top_count: number;
}

export const DEFAULT_PARAMS: AnalysisParams = {
  k: 20,
  max_depth: 1,
  rho: 0.1,
  tau: 0.2,
  min_samples_split: 2,
  top_count: 6,
};

export interface ExplorerState {
  groupings: GroupingsResponse | null;
  grouping: Grouping;
  classIndex: number | null;
  params: AnalysisParams;
  /** Cumulative disabled feature set, kept sorted. */
  disabled: number[];
  report: ReportEnvelope | null;
  /** Tree-node id ("root", "root.left.right", ...) or null. */
  selectedNode: string | null;
  banner: string | null;
  cache: Map<string, ReportEnvelope>;
  log: RequestLogEntry[];
}

export function createState(): ExplorerState {
  return {
    groupings: null,
    grouping: "label",
    classIndex: null,
    params: { ...DEFAULT_PARAMS },
    disabled: [],
    report: null,
    selectedNode: null,
    banner: null,
    cache: new Map(),
    log: [],
  };
}

/** Add or remove one feature from a sorted disabled set. */
export function toggleDisabled(disabled: readonly number[], feature: number): number[] {
  const next = disabled.includes(feature)
    ? disabled.filter((f) => f !== feature)
    : [...disabled, feature];
  return next.sort((a, b) => a - b);
}

/** The analyze request body for the current state. */
export function analyzeBody(state: ExplorerState): AnalyzeBody {
  if (state.classIndex === null) {
    throw new Error("no class selected");
  }
  return {
    grouping: state.grouping,
    class_index: state.classIndex,
    ...state.params,
    disabled_features: [...state.disabled],
  };
}

/** Cache key: the body itself, field order fixed by construction. */
export function cacheKey(body: AnalyzeBody): string {
  return JSON.stringify(body);
}

/** Every feature index referenced by any split in the tree. */
export function treeFeatures(node: TreeNode | null): Set<number> {
  const features = new Set<number>();
  const walk = (current: TreeNode): void => {
    if (isSplitNode(current)) {
      features.add(current.split.feature);
      walk(current.left);
      walk(current.right);
    }
  };
  if (node !== null) walk(node);
  return features;
}

export function treeReferencesFeature(node: TreeNode | null, feature: number): boolean {
  return treeFeatures(node).has(feature);
}
