// Thin JSON client for the service API; fetch is injectable for tests.

import type {
  AggregateTable,
  AnswerResult,
  SessionCreated,
  StateSummary,
  TrialInfo,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
  }
}

export class ApiClient {
  constructor(
    private readonly fetchFn: FetchLike = (...args) => fetch(...args),
    private readonly base: string = "",
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const res = await this.fetchFn(this.base + path, init);
    if (!res.ok) {
      let detail = res.statusText;
      try {
        const parsed = (await res.json()) as { detail?: string };
        if (parsed.detail) detail = parsed.detail;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(res.status, detail);
    }
    return (await res.json()) as T;
  }

  createSession(): Promise<SessionCreated> {
    return this.request("POST", "/api/sessions");
  }

  fetchTrial(sessionId: string): Promise<TrialInfo> {
    return this.request("GET", `/api/sessions/${sessionId}/trial`);
  }

  postAnswer(sessionId: string, digit: number | null): Promise<AnswerResult> {
    return this.request("POST", `/api/sessions/${sessionId}/answer`, { digit });
  }

  fetchReport(sessionId: string): Promise<StateSummary> {
    return this.request("GET", `/api/sessions/${sessionId}/report`);
  }

  fetchAggregate(): Promise<AggregateTable> {
    return this.request("GET", "/api/aggregate");
  }
}
