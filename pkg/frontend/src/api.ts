/** Thin typed client over the review service endpoints. */

import type {
  ClustersPayload,
  ClusterDimension,
  GraphPayload,
  JobStatus,
  QueryResponse,
  StatsPayload,
} from "./types.js";

export type FetchLike = (
  input: string,
  init?: RequestInit,
) => Promise<Response>;

/** Non-2xx response; `detail` carries the service's structured error. */
export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly detail: Record<string, unknown>,
  ) {
    super(
      typeof detail.error === "string" ? detail.error : `request failed (${status})`,
    );
  }

  get position(): number | null {
    return typeof this.detail.position === "number" ? this.detail.position : null;
  }
}

export class ApiClient {
  constructor(
    public readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(this.baseUrl + path, init);
    const body = await response.json().catch(() => ({}));
    if (!response.ok) {
      const detail =
        body && typeof body === "object" && "detail" in body
          ? (body as { detail: Record<string, unknown> }).detail
          : { error: `HTTP ${response.status}` };
      throw new ApiError(response.status, detail ?? {});
    }
    return body as T;
  }

  private post<T>(path: string, payload: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  search(payload: {
    terms: string;
    year_from: number;
    year_to: number;
    sources?: string[];
  }): Promise<{ job_id: string }> {
    return this.post("/search", payload);
  }

  job(jobId: string): Promise<JobStatus> {
    return this.request(`/jobs/${jobId}`);
  }

  graph(): Promise<GraphPayload> {
    return this.request("/graph");
  }

  stats(): Promise<StatsPayload> {
    return this.request("/stats");
  }

  clusters(dimension: ClusterDimension): Promise<ClustersPayload> {
    return this.request(`/clusters/${dimension}`);
  }

  query(q: string): Promise<QueryResponse> {
    return this.post("/query", { q });
  }
}
