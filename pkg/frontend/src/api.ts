/** Typed client for the suggestion server's JSON API. */

export type Engine = "neural" | "statistical";

export interface Suggestion {
  token: string;
  probability: number;
}

export interface SuggestResponse {
  candidates: Suggestion[];
  order_used: number;
  latency_ms: number;
}

export interface CompleteResponse {
  tokens: string[];
  terminated_by: string;
  steps: number;
}

export interface HealthResponse {
  status: string;
  bundle_orders: number[];
  vocab_size: number;
}

export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
    this.name = "ApiError";
  }
}

/** Minimal surface the controller needs; tests substitute a fake. */
export interface SuggestApi {
  suggest(context: string, k: number, engine: Engine): Promise<SuggestResponse>;
  complete(prefix: string, engine: Engine, maxLen?: number): Promise<CompleteResponse>;
  health(): Promise<HealthResponse>;
}

async function postJson<T>(url: string, payload: unknown): Promise<T> {
  const resp = await fetch(url, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(payload),
  });
  const body = await resp.json().catch(() => ({}));
  if (!resp.ok) {
    const detail = (body as { error?: string }).error ?? resp.statusText;
    throw new ApiError(resp.status, detail);
  }
  return body as T;
}

export function createApi(baseUrl: string): SuggestApi {
  const root = baseUrl.replace(/\/$/, "");
  return {
    suggest: (context, k, engine) =>
      postJson<SuggestResponse>(`${root}/api/suggest`, { context, k, engine }),
    complete: (prefix, engine, maxLen) =>
      postJson<CompleteResponse>(`${root}/api/complete`, {
        prefix,
        engine,
        ...(maxLen === undefined ? {} : { max_len: maxLen }),
      }),
    health: async () => {
      const resp = await fetch(`${root}/api/health`);
      const body = await resp.json();
      if (!resp.ok) throw new ApiError(resp.status, body.error ?? "health check failed");
      return body as HealthResponse;
    },
  };
}
