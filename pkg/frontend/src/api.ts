// ============================================================================
// HTTP client for the analysis server.
//
// The explorer talks to the server exclusively through this module.  The
// fetch implementation is injected so tests can replay captured responses,
// and every exchange is appended to the shared request log.  Analyze
// responses keep their raw bytes alongside the parsed document (see
// rawjson.ts); visualization assets resolve to null on 404 so the UI can
// degrade to placeholders instead of crashing.
// ============================================================================

import type {
  AnalyzeBody,
  FeatureTopResponse,
  Grouping,
  GroupingsResponse,
} from "./types.js";
import type { ReportEnvelope, RequestLogEntry } from "./state.js";
import { scanRawLiterals } from "./rawjson.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string
  ) {
    super(`server returned ${status}: ${detail}`);
    this.name = "ApiError";
  }
}

/** A parsed feature-top response plus its raw bytes. */
export interface FeatureTopEnvelope {
  doc: FeatureTopResponse;
  rawText: string;
  raw: ReturnType<typeof scanRawLiterals>;
}

function detailOf(text: string): string {
  try {
    const doc = JSON.parse(text) as { detail?: unknown };
    if (typeof doc.detail === "string") return doc.detail;
    if (doc.detail !== undefined) return JSON.stringify(doc.detail);
  } catch {
    // fall through to the raw body
  }
  return text;
}

export class ApiClient {
  constructor(
    private readonly fetchFn: FetchLike,
    private readonly log: RequestLogEntry[],
    private readonly base = ""
  ) {}

  private record(
    method: string,
    path: string,
    body: string | null,
    status: number,
    responseText: string | null
  ): void {
    this.log.push({ method, path, body, status, responseText });
  }

  async groupings(signal?: AbortSignal): Promise<GroupingsResponse> {
    const path = "/api/groupings";
    const response = await this.fetchFn(this.base + path, { signal });
    const text = await response.text();
    this.record("GET", path, null, response.status, text);
    if (!response.ok) throw new ApiError(response.status, detailOf(text));
    return JSON.parse(text) as GroupingsResponse;
  }

  async analyze(body: AnalyzeBody, signal?: AbortSignal): Promise<ReportEnvelope> {
    const path = "/api/analyze";
    const payload = JSON.stringify(body);
    const response = await this.fetchFn(this.base + path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: payload,
      signal,
    });
    const text = await response.text();
    this.record("POST", path, payload, response.status, text);
    if (!response.ok) throw new ApiError(response.status, detailOf(text));
    return {
      doc: JSON.parse(text),
      rawText: text,
      raw: scanRawLiterals(text),
    };
  }

  async featureTop(
    feature: number,
    grouping: Grouping,
    classIndex: number,
    count: number,
    signal?: AbortSignal
  ): Promise<FeatureTopEnvelope | null> {
    const path =
      `/api/features/${feature}/top` +
      `?grouping=${grouping}&class_index=${classIndex}&count=${count}`;
    const response = await this.fetchFn(this.base + path, { signal });
    const text = await response.text();
    this.record("GET", path, null, response.status, text);
    if (response.status === 404) return null;
    if (!response.ok) throw new ApiError(response.status, detailOf(text));
    return {
      doc: JSON.parse(text) as FeatureTopResponse,
      rawText: text,
      raw: scanRawLiterals(text),
    };
  }

  async heatmap(
    feature: number,
    row: number,
    signal?: AbortSignal
  ): Promise<Uint8Array | null> {
    const path = `/api/heatmap/${feature}/${row}`;
    const response = await this.fetchFn(this.base + path, { signal });
    if (response.status === 404) {
      this.record("GET", path, null, response.status, null);
      return null;
    }
    if (!response.ok) {
      const text = await response.text();
      this.record("GET", path, null, response.status, text);
      throw new ApiError(response.status, detailOf(text));
    }
    const bytes = new Uint8Array(await response.arrayBuffer());
    this.record("GET", path, null, response.status, null);
    return bytes;
  }
}
