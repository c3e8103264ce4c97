/** Typed client for the control API. Every decision stays server-side;
 * this file only moves JSON. */

import type {
  ChainReport,
  LogRecord,
  PendingItem,
  Profile,
  ResolveChoice,
  ResolveResult,
  Taxonomy,
} from "./types.js";

export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
    this.name = "ApiError";
  }
}

export class ControlApi {
  // base is "" in the served bundle (same origin as the control API)
  constructor(private readonly base: string = "") {}

  private async call<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await fetch(this.base + path, {
      method,
      headers: body === undefined ? undefined : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const text = await response.text();
    let payload: unknown = null;
    if (text) {
      try {
        payload = JSON.parse(text);
      } catch {
        payload = null; // non-JSON body; fall back to the status line
      }
    }
    if (!response.ok) {
      const detail =
        payload !== null && typeof payload === "object" && "error" in payload
          ? String((payload as { error: unknown }).error)
          : `${response.status} ${response.statusText}`;
      throw new ApiError(response.status, detail);
    }
    return payload as T;
  }

  preferences(): Promise<Profile> {
    return this.call("GET", "/api/preferences");
  }

  savePreferences(profile: Profile): Promise<Profile> {
    return this.call("PUT", "/api/preferences", profile);
  }

  pending(): Promise<PendingItem[]> {
    return this.call("GET", "/api/pending");
  }

  resolve(id: string, choices: ResolveChoice[]): Promise<ResolveResult> {
    const path = `/api/pending/${encodeURIComponent(id)}/resolve`;
    return this.call("POST", path, { choices });
  }

  log(options: { origin?: string; limit?: number } = {}): Promise<LogRecord[]> {
    const params = new URLSearchParams();
    if (options.origin) params.set("origin", options.origin);
    if (options.limit !== undefined) params.set("limit", String(options.limit));
    const query = params.toString();
    return this.call("GET", "/api/log" + (query ? `?${query}` : ""));
  }

  verifyChain(): Promise<ChainReport> {
    return this.call("GET", "/api/log/verify");
  }

  taxonomy(): Promise<Taxonomy> {
    return this.call("GET", "/api/taxonomy");
  }
}
