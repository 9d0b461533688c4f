// Typed client for the recommendation service's JSON API.

export interface PaperItem {
  id: string;
  title: string;
  year: number | null;
  venue: string | null;
  score?: number;
}

export interface NamedScore {
  name: string;
  score: number;
}

export interface BibliographyResponse {
  session_id: string;
  seeds: PaperItem[];
  unmatched: string[];
}

export interface QueryParams {
  algorithm: string;
  k: number;
  lambda: number;
  d: number;
  target: string;
}

export interface PageResponse {
  items: PaperItem[];
  page?: number;
  params: QueryParams;
}

export interface ListResponse {
  items: NamedScore[];
  params: QueryParams;
}

export interface FeedbackResponse {
  ok: boolean;
  page: PaperItem[];
  relevant_count: number;
  irrelevant_count: number;
}

export interface SessionState {
  session_id: string;
  seeds: PaperItem[];
  relevant_count: number;
  irrelevant_count: number;
  shown_count: number;
  pages_served: number;
  params: { algorithm: string; lambda: number; d: number; k: number };
}

export interface RecommendOptions {
  sessionId: string;
  algorithm?: string;
  k?: number;
  lambda?: number;
  d?: number;
  target?: "papers" | "venues" | "experts";
}

export class ApiError extends Error {
  constructor(
    public status: number,
    message: string,
    public retryAfter: number | null = null,
    public unmatched: string[] = [],
  ) {
    super(message);
  }
}

function detailMessage(payload: unknown): { message: string; unmatched: string[] } {
  if (payload && typeof payload === "object" && "detail" in payload) {
    const detail = (payload as { detail: unknown }).detail;
    if (typeof detail === "string") return { message: detail, unmatched: [] };
    if (detail && typeof detail === "object") {
      const d = detail as { message?: string; unmatched?: string[] };
      return { message: d.message ?? "request failed", unmatched: d.unmatched ?? [] };
    }
  }
  return { message: "request failed", unmatched: [] };
}

export class ApiClient {
  constructor(private base: string = "") {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await fetch(this.base + path, init);
    if (!resp.ok) {
      let payload: unknown = null;
      try {
        payload = await resp.json();
      } catch {
        // non-JSON error body
      }
      const { message, unmatched } = detailMessage(payload);
      const ra = resp.headers.get("Retry-After");
      throw new ApiError(resp.status, message, ra ? Number(ra) : null, unmatched);
    }
    return (await resp.json()) as T;
  }

  bibliography(text: string): Promise<BibliographyResponse> {
    return this.request("/api/bibliography", {
      method: "POST",
      headers: { "Content-Type": "text/plain; charset=utf-8" },
      body: text,
    });
  }

  async search(q: string): Promise<PaperItem[]> {
    const got = await this.request<{ results: PaperItem[] }>(
      `/api/search?q=${encodeURIComponent(q)}`);
    return got.results;
  }

  recommend(opts: RecommendOptions & { target?: "papers" }): Promise<PageResponse>;
  recommend(opts: RecommendOptions): Promise<PageResponse | ListResponse>;
  recommend(opts: RecommendOptions): Promise<PageResponse | ListResponse> {
    const body: Record<string, unknown> = { session_id: opts.sessionId };
    if (opts.algorithm !== undefined) body.algorithm = opts.algorithm;
    if (opts.k !== undefined) body.k = opts.k;
    if (opts.lambda !== undefined) body.lambda = opts.lambda;
    if (opts.d !== undefined) body.d = opts.d;
    body.target = opts.target ?? "papers";
    return this.request("/api/recommend", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  feedback(sessionId: string, relevant: string[], irrelevant: string[]): Promise<FeedbackResponse> {
    return this.request("/api/feedback", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ session_id: sessionId, relevant, irrelevant }),
    });
  }

  session(sessionId: string): Promise<SessionState> {
    return this.request(`/api/session/${sessionId}`);
  }

  health(): Promise<{ papers: number; edges: number }> {
    return this.request("/api/health");
  }
}
