import { afterEach, describe, expect, it, vi } from "vitest";

import { ApiError, ControlApi } from "../src/api.js";

function jsonResponse(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

// a Response body reads once, so hand out a fresh one per call
function mockFetch(make: () => Response) {
  const fn = vi.fn(async () => make());
  vi.stubGlobal("fetch", fn);
  return fn;
}

afterEach(() => {
  vi.unstubAllGlobals();
});

describe("ControlApi", () => {
  it("fetches preferences from the api root", async () => {
    const profile = { owner: "urn:app:prefs", defaultDecision: "ask", rules: [] };
    const fn = mockFetch(() => jsonResponse(200, profile));
    const api = new ControlApi("http://127.0.0.1:9");
    await expect(api.preferences()).resolves.toEqual(profile);
    expect(fn).toHaveBeenCalledWith(
      "http://127.0.0.1:9/api/preferences",
      expect.objectContaining({ method: "GET", body: undefined }),
    );
  });

  it("puts preferences as JSON", async () => {
    const profile = { owner: "urn:app:prefs", defaultDecision: "ask" as const, rules: [] };
    const fn = mockFetch(() => jsonResponse(200, profile));
    await new ControlApi().savePreferences(profile);
    const [url, init] = fn.mock.calls[0] as unknown as [string, RequestInit];
    expect(url).toBe("/api/preferences");
    expect(init.method).toBe("PUT");
    expect(init.headers).toEqual({ "Content-Type": "application/json" });
    expect(JSON.parse(init.body as string)).toEqual(profile);
  });

  it("percent-encodes pending ids in the resolve path", async () => {
    const fn = mockFetch(() =>
      jsonResponse(200, { outcome: "partial", requestDigest: "0".repeat(64), grantedIndexes: [0] }),
    );
    const result = await new ControlApi().resolve("a/b c", [
      { permissionIndex: 0, decision: "allow" },
    ]);
    expect(result.outcome).toBe("partial");
    const [url, init] = fn.mock.calls[0] as unknown as [string, RequestInit];
    expect(url).toBe("/api/pending/a%2Fb%20c/resolve");
    expect(JSON.parse(init.body as string)).toEqual({
      choices: [{ permissionIndex: 0, decision: "allow" }],
    });
  });

  it("builds log queries only from given filters", async () => {
    const fn = mockFetch(() => jsonResponse(200, []));
    await new ControlApi().log();
    expect(fn).toHaveBeenLastCalledWith("/api/log", expect.anything());
    await new ControlApi().log({ origin: "http://shop.example:80", limit: 5 });
    expect(fn).toHaveBeenLastCalledWith(
      "/api/log?origin=http%3A%2F%2Fshop.example%3A80&limit=5",
      expect.anything(),
    );
  });

  it("unwraps the error body into ApiError", async () => {
    mockFetch(() => jsonResponse(422, { error: "purpose not in taxonomy: urn:x" }));
    const call = new ControlApi().savePreferences({
      owner: "urn:app:prefs",
      defaultDecision: "ask",
      rules: [],
    });
    await expect(call).rejects.toMatchObject({
      name: "ApiError",
      status: 422,
      message: "purpose not in taxonomy: urn:x",
    });
  });

  it("falls back to the status line for non-JSON errors", async () => {
    mockFetch(() => new Response("<html>boom</html>", { status: 502, statusText: "Bad Gateway" }));
    await expect(new ControlApi().pending()).rejects.toThrow("502 Bad Gateway");
    await expect(new ControlApi().pending()).rejects.toBeInstanceOf(ApiError);
  });

  it("hits the verify and taxonomy endpoints", async () => {
    const fn = mockFetch(() => jsonResponse(200, { ok: true, length: 3, firstBadIndex: null, detail: null }));
    await new ControlApi().verifyChain();
    expect(fn).toHaveBeenLastCalledWith("/api/log/verify", expect.anything());
    const fn2 = mockFetch(() => jsonResponse(200, { roots: [], nodes: {} }));
    await new ControlApi().taxonomy();
    expect(fn2).toHaveBeenLastCalledWith("/api/taxonomy", expect.anything());
  });
});
