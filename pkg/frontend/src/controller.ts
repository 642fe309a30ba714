// ============================================================================
// Controller: the explorer's behaviour, DOM-free.
//
// Owns the state transitions around analysis round trips: request bodies
// carry the cumulative disabled set, responses replace the view, identical
// requests are served from the report cache (so re-enabling a feature
// restores the earlier report without HTTP), server errors raise a
// non-destructive banner, and only one analyze request is ever in flight
// -- starting a new one aborts its predecessor.
// ============================================================================

import type { Grouping } from "./types.js";
import { ApiClient, ApiError, type FetchLike } from "./api.js";
import {
  type AnalysisParams,
  type ExplorerState,
  analyzeBody,
  cacheKey,
  createState,
  toggleDisabled,
} from "./state.js";

export type AnalyzeOutcome = "fetched" | "cached" | "aborted" | "error";

function isAbort(error: unknown): boolean {
  return error instanceof Error && error.name === "AbortError";
}

export class ExplorerController {
  readonly state: ExplorerState;
  readonly client: ApiClient;
  private inflight: AbortController | null = null;

  constructor(fetchFn: FetchLike) {
    this.state = createState();
    this.client = new ApiClient(fetchFn, this.state.log);
  }

  async init(): Promise<void> {
    const doc = await this.client.groupings();
    this.state.groupings = doc;
    const first = doc.classes[0];
    if (first !== undefined) {
      this.state.classIndex = first.index;
      await this.runAnalyze();
    }
  }

  async selectClass(grouping: Grouping, classIndex: number): Promise<AnalyzeOutcome> {
    this.state.grouping = grouping;
    this.state.classIndex = classIndex;
    this.state.selectedNode = null;
    return this.runAnalyze();
  }

  async setParams(update: Partial<AnalysisParams>): Promise<AnalyzeOutcome> {
    this.state.params = { ...this.state.params, ...update };
    return this.runAnalyze();
  }

  async toggleDisable(feature: number): Promise<AnalyzeOutcome> {
    this.state.disabled = toggleDisabled(this.state.disabled, feature);
    return this.runAnalyze();
  }

  async runAnalyze(): Promise<AnalyzeOutcome> {
    const body = analyzeBody(this.state);
    const key = cacheKey(body);

    const cached = this.state.cache.get(key);
    if (cached !== undefined) {
      this.state.report = cached;
      this.state.banner = null;
      this.state.selectedNode = null;
      return "cached";
    }

    this.inflight?.abort();
    const controller = new AbortController();
    this.inflight = controller;
    try {
      const envelope = await this.client.analyze(body, controller.signal);
      if (controller.signal.aborted) return "aborted";
      this.state.cache.set(key, envelope);
      this.state.report = envelope;
      this.state.banner = null;
      this.state.selectedNode = null;
      return "fetched";
    } catch (error) {
      if (isAbort(error)) return "aborted";
      if (error instanceof ApiError) {
        // Keep the previous report on screen; surface a retry banner.
        this.state.banner = error.message;
        return "error";
      }
      this.state.banner = `malformed server response: ${String(error)}`;
      return "error";
    } finally {
      if (this.inflight === controller) this.inflight = null;
    }
  }
}
