import { describe, expect, it } from "vitest";

import { ApiClient, ApiError, type FetchLike } from "../src/api.js";

function fakeFetch(
  status: number,
  body: unknown,
): { fetchFn: FetchLike; calls: Array<{ url: string; init?: RequestInit }> } {
  const calls: Array<{ url: string; init?: RequestInit }> = [];
  const fetchFn: FetchLike = async (url, init) => {
    calls.push({ url, init });
    return new Response(JSON.stringify(body), {
      status,
      headers: { "Content-Type": "application/json" },
    });
  };
  return { fetchFn, calls };
}

describe("ApiClient", () => {
  it("hits the documented endpoints", async () => {
    const { fetchFn, calls } = fakeFetch(200, []);
    const client = new ApiClient("", fetchFn);
    await client.history();
    await client.queue();
    await client.queue(5);
    expect(calls.map((c) => c.url)).toEqual([
      "/api/history",
      "/api/queue",
      "/api/queue?limit=5",
    ]);
  });

  it("posts label submissions with the documented field names", async () => {
    const { fetchFn, calls } = fakeFetch(200, { accepted: true, quota_remaining: 3 });
    const client = new ApiClient("", fetchFn);
    const result = await client.submitLabel(42, 2, "tester");
    expect(result.quota_remaining).toBe(3);
    expect(calls[0].url).toBe("/api/labels");
    expect(calls[0].init?.method).toBe("POST");
    const body = JSON.parse(String(calls[0].init?.body));
    expect(body.sample_id).toBe(42);
    expect(body.label).toBe(2);
    expect(body.annotator).toBe("tester");
    expect(typeof body.timestamp).toBe("string");
  });

  it("maps error responses to ApiError with the server detail", async () => {
    const { fetchFn } = fakeFetch(409, { detail: "sample 42 already labeled this round" });
    const client = new ApiClient("", fetchFn);
    const err = await client.submitLabel(42, 1).catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.status).toBe(409);
    expect(err.detail).toContain("already labeled");
  });

  it("prefixes a base URL when given", async () => {
    const { fetchFn, calls } = fakeFetch(200, {
      round: 0, labels_fraction: 0, quota_remaining: 1, K: 2,
      phase: "awaiting_labels", failure: null, last_round_metrics: null,
    });
    await new ApiClient("http://localhost:8000", fetchFn).status();
    expect(calls[0].url).toBe("http://localhost:8000/api/status");
  });
});
