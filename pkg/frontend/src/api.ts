/** Thin typed client over the service's five endpoints.
 *
 * The fetch implementation is injectable so the client is testable
 * without a network; this is the UI's only I/O surface.
 */

import type {
  HistogramPair,
  QueueItem,
  RoundRecord,
  StatusInfo,
  SubmitResult,
} from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }
}

async function parseOrThrow<T>(resp: Response): Promise<T> {
  if (!resp.ok) {
    let detail = resp.statusText;
    try {
      const body = (await resp.json()) as { detail?: string };
      if (body && typeof body.detail === "string") detail = body.detail;
    } catch {
      /* non-JSON error body; keep statusText */
    }
    throw new ApiError(resp.status, detail);
  }
  return (await resp.json()) as T;
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  status(): Promise<StatusInfo> {
    return this.get<StatusInfo>("/api/status");
  }

  queue(limit?: number): Promise<QueueItem[]> {
    const suffix = limit === undefined ? "" : `?limit=${limit}`;
    return this.get<QueueItem[]>(`/api/queue${suffix}`);
  }

  history(): Promise<RoundRecord[]> {
    return this.get<RoundRecord[]>("/api/history");
  }

  histograms(): Promise<HistogramPair> {
    return this.get<HistogramPair>("/api/histograms");
  }

  async submitLabel(
    sampleId: number,
    label: number,
    annotator = "ui",
  ): Promise<SubmitResult> {
    const resp = await this.fetchFn(`${this.baseUrl}/api/labels`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({
        sample_id: sampleId,
        label,
        annotator,
        timestamp: new Date().toISOString(),
      }),
    });
    return parseOrThrow<SubmitResult>(resp);
  }

  private async get<T>(path: string): Promise<T> {
    const resp = await this.fetchFn(`${this.baseUrl}${path}`);
    return parseOrThrow<T>(resp);
  }
}
