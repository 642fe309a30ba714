// Shared test plumbing: fixture loading and canned-response fetch fakes.
//
// The JSON/PGM fixtures under fixtures/ are byte-exact captures of the
// analysis server's responses (see scripts/make_fixtures.py), so asserting
// against them exercises the real wire contract.

import { readFileSync } from "node:fs";
import path from "node:path";
import { fileURLToPath } from "node:url";

import type { FetchLike } from "../src/api.js";

const here = path.dirname(fileURLToPath(import.meta.url));

export function fixtureText(name: string): string {
  return readFileSync(path.join(here, "fixtures", name), "utf8");
}

export function fixtureBytes(name: string): Uint8Array {
  return new Uint8Array(readFileSync(path.join(here, "fixtures", name)));
}

export function jsonResponse(text: string, status = 200): Response {
  return new Response(text, {
    status,
    headers: { "content-type": "application/json" },
  });
}

export function bytesResponse(bytes: Uint8Array, status = 200): Response {
  return new Response(bytes.slice().buffer as ArrayBuffer, { status });
}

export interface RouteCall {
  input: string;
  init?: RequestInit;
}

/**
 * A fetch fake driven by a routing function; records every call.
 * Honors AbortSignal: if the route returns null the request hangs until
 * aborted (rejecting with AbortError), which is how in-flight
 * cancellation is exercised.
 */
export function fakeFetch(
  route: (input: string, init?: RequestInit) => Response | null
): { fetch: FetchLike; calls: RouteCall[] } {
  const calls: RouteCall[] = [];
  const fetchFn: FetchLike = (input, init) => {
    calls.push({ input, ...(init === undefined ? {} : { init }) });
    const response = route(input, init);
    if (response !== null) return Promise.resolve(response);
    return new Promise((_resolve, reject) => {
      const signal = init?.signal;
      if (signal == null) return; // hangs forever without a signal
      const abort = () =>
        reject(new DOMException("The operation was aborted.", "AbortError"));
      if (signal.aborted) abort();
      else signal.addEventListener("abort", abort);
    });
  };
  return { fetch: fetchFn, calls };
}
