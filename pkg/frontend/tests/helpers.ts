/** Shared plumbing for the panel tests: live client, traffic recorder. */

import { inject } from "vitest";
import { ApiClient, type FetchLike } from "../src/api";

export interface RecordedCall {
  method: string;
  url: string;
  requestBody: unknown;
  status: number;
  responseBody: unknown;
}

/**
 * Wraps real fetch and keeps both sides of every exchange, so a test can
 * audit exactly which numbers crossed the wire.
 */
export function recordingFetch(log: RecordedCall[]): FetchLike {
  return async (input, init) => {
    const res = await fetch(input, init);
    const entry: RecordedCall = {
      method: init?.method ?? "GET",
      url: input,
      requestBody: init?.body ? JSON.parse(String(init.body)) : null,
      status: res.status,
      responseBody: null,
    };
    try {
      entry.responseBody = await res.clone().json();
    } catch {
      // non-JSON body
    }
    log.push(entry);
    return res;
  };
}

export function liveClient(log?: RecordedCall[]): ApiClient {
  const base = inject("apiBase");
  return new ApiClient(base, log ? recordingFetch(log) : undefined);
}

export function mountRoot(): HTMLElement {
  document.body.innerHTML = "";
  const root = document.createElement("div");
  document.body.append(root);
  return root;
}

export function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}

/** Every number anywhere inside recorded response bodies. */
export function harvestNumbers(value: unknown, out: number[] = []): number[] {
  if (typeof value === "number") {
    out.push(value);
  } else if (Array.isArray(value)) {
    for (const v of value) harvestNumbers(v, out);
  } else if (value !== null && typeof value === "object") {
    for (const v of Object.values(value)) harvestNumbers(v, out);
  }
  return out;
}

/**
 * True when the displayed text is some recorded number rendered at the
 * displayed precision.
 */
export function displayedMatchesTraffic(
  text: string,
  numbers: number[],
): boolean {
  const trimmed = text.trim();
  if (!/^-?\d+(\.\d+)?$/.test(trimmed)) return false;
  const dot = trimmed.indexOf(".");
  const digits = dot === -1 ? 0 : trimmed.length - dot - 1;
  return numbers.some((n) => n.toFixed(digits) === trimmed);
}
