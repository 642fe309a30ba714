// ============================================================================
// Wire types: the analysis server's JSON payloads, field for field.
//
// These mirror the HTTP contract -- the explorer never computes an error
// rate, coverage, or importance value itself.  Every metric shown in the
// UI is read from one of these structures (and displayed via the raw
// source text captured by rawjson.ts, so the bytes match the server's).
// ============================================================================

export type Grouping = "label" | "prediction";

export interface ToolInfo {
  name: string;
  version: string;
}

export interface ClassEntry {
  index: number;
  name: string;
  label_size: number;
  label_errors: number;
  prediction_size: number;
  prediction_errors: number;
}

export interface GroupingsResponse {
  tool: string;
  version: string;
  n_images: number;
  n_features: number;
  groupings: Grouping[];
  classes: ClassEntry[];
}

export interface SplitSpec {
  feature: number;
  threshold: number;
}

export interface LeafStats {
  size: number;
  errors: number;
  er: number;
  ec: number;
  iv: number;
}

export type TreeNode =
  | { split: SplitSpec; left: TreeNode; right: TreeNode }
  | { leaf: LeafStats };

export function isSplitNode(
  node: TreeNode
): node is { split: SplitSpec; left: TreeNode; right: TreeNode } {
  return "split" in node;
}

export interface SelectionEntry {
  feature: number;
  mi_bits: number;
  threshold: number;
}

export interface FailureMode {
  rank: number;
  path: string;
  size: number;
  errors: number;
  er: number;
  ec: number;
  iv: number;
  caption: string;
  feature: number;
  top_rows: number[];
  top_image_ids: string[];
}

export interface TopLeaf {
  path: string;
  size: number;
  errors: number;
  er: number;
  ec: number;
  iv: number;
  valid: boolean;
}

export interface GroupStats {
  size: number;
  errors: number;
  base_error_rate: number;
}

export interface AnalysisConfigDoc {
  k: number;
  max_depth: number;
  rho: number;
  tau: number;
  min_samples_split: number;
  disabled_features: number[];
  top_count: number;
}

export interface AnalysisReport {
  tool: ToolInfo;
  grouping: Grouping;
  class_index: number;
  class_name: string;
  config: AnalysisConfigDoc;
  status: "ok" | "no_data";
  group: GroupStats;
  selection: SelectionEntry[];
  tree: TreeNode | null;
  aler: number;
  gain: number;
  top_leaf: TopLeaf | null;
  modes: FailureMode[];
}

export interface FeatureTopResponse {
  feature: number;
  grouping: Grouping;
  class_index: number;
  rows: number[];
  image_ids: string[];
  activations: number[];
}

/** Body of POST /api/analyze. */
export interface AnalyzeBody {
  grouping: Grouping;
  class_index: number;
  k: number;
  max_depth: number;
  rho: number;
  tau: number;
  min_samples_split: number;
  disabled_features: number[];
  top_count: number;
}
