import type {
  AnalysisReport,
  ConflictJson,
  Decision,
  ModelSummary,
  ModelTree,
  SessionState,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
  }
}

/** "Model too large" marker for analysis?count=true on capped models. */
export class CountUnavailable extends ApiError {}

export type DecideOutcome =
  | { applied: true; state: SessionState }
  | { applied: false; conflict: ConflictJson; state: SessionState };

/** Thin typed client; the base URL and fetch are injectable so tests can
 * run against recorded fixtures. */
export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request(path: string, init?: RequestInit): Promise<unknown> {
    const response = await this.fetchFn(this.baseUrl + path, init);
    if (response.status === 422) {
      throw new CountUnavailable(422, await response.text());
    }
    if (!response.ok) {
      throw new ApiError(response.status, `${init?.method ?? "GET"} ${path}: ${response.status}`);
    }
    return response.json();
  }

  health(): Promise<{ status: string }> {
    return this.request("/api/health") as Promise<{ status: string }>;
  }

  models(): Promise<ModelSummary[]> {
    return this.request("/api/models") as Promise<ModelSummary[]>;
  }

  tree(model: string): Promise<ModelTree> {
    return this.request(`/api/models/${encodeURIComponent(model)}/tree`) as Promise<ModelTree>;
  }

  analysis(model: string, count = false): Promise<AnalysisReport> {
    const query = count ? "?count=true" : "";
    return this.request(
      `/api/models/${encodeURIComponent(model)}/analysis${query}`,
    ) as Promise<AnalysisReport>;
  }

  async createSession(model: string): Promise<SessionState> {
    const body = (await this.request("/api/sessions", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ model }),
    })) as { session_id: string; state: SessionState };
    return body.state;
  }

  getSession(sessionId: string): Promise<SessionState> {
    return this.request(`/api/sessions/${sessionId}`) as Promise<SessionState>;
  }

  /** decide never throws on 409: the rejection carries the would-be
   * conflict, which the caller renders in the conflict panel. */
  async decide(sessionId: string, feature: string, decision: Decision): Promise<DecideOutcome> {
    const response = await this.fetchFn(
      `${this.baseUrl}/api/sessions/${sessionId}/decide`,
      {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify({ feature, decision }),
      },
    );
    if (response.status === 409) {
      const body = (await response.json()) as { conflict: ConflictJson; state: SessionState };
      return { applied: false, conflict: body.conflict, state: body.state };
    }
    if (!response.ok) {
      throw new ApiError(response.status, `decide ${feature}: ${response.status}`);
    }
    return { applied: true, state: (await response.json()) as SessionState };
  }
}
