/** Typed API client: bearer auth, in-flight request deduplication, and
 * response-generation tracking so stale answers never overwrite fresh ones.
 */
import type {
  HealthResponse,
  LookupResponse,
  NormalizeResponse,
  PerturbResponse,
  TimelineResponse,
} from "./types";

export class ApiError extends Error {
  constructor(
    public code: string,
    message: string,
    public status: number,
  ) {
    super(message);
  }
}

const TOKEN_KEY = "cryptext.token";

export function getStoredToken(): string {
  try {
    return window.sessionStorage.getItem(TOKEN_KEY) ?? "";
  } catch {
    return "";
  }
}

export function storeToken(token: string): void {
  try {
    if (token) window.sessionStorage.setItem(TOKEN_KEY, token);
    else window.sessionStorage.removeItem(TOKEN_KEY);
  } catch {
    // session storage unavailable (e.g. sandboxed iframe): token is per-tab anyway
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  private inflight = new Map<string, Promise<unknown>>();
  fetches = 0; // observable request counter (cache/dedup diagnostics)

  constructor(
    private baseUrl: string = "",
    private fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private headers(): Record<string, string> {
    const token = getStoredToken();
    const base: Record<string, string> = { Accept: "application/json" };
    if (token) base.Authorization = `Bearer ${token}`;
    return base;
  }

  private async request<T>(key: string, run: () => Promise<T>): Promise<T> {
    const pending = this.inflight.get(key);
    if (pending) return pending as Promise<T>;
    const promise = run().finally(() => this.inflight.delete(key));
    this.inflight.set(key, promise);
    return promise;
  }

  private async parse<T>(response: Response): Promise<T> {
    let body: unknown = null;
    try {
      body = await response.json();
    } catch {
      // fall through to the generic error below
    }
    if (!response.ok) {
      const error = (body as { error?: { code?: string; message?: string } } | null)?.error;
      throw new ApiError(error?.code ?? "HttpError", error?.message ?? response.statusText, response.status);
    }
    return body as T;
  }

  private async get<T>(route: string, params: Record<string, string | number | boolean>): Promise<T> {
    const query = new URLSearchParams(
      Object.entries(params).map(([k, v]) => [k, String(v)]),
    ).toString();
    const url = `${this.baseUrl}${route}?${query}`;
    return this.request(`GET ${url}`, async () => {
      this.fetches += 1;
      return this.parse<T>(await this.fetchImpl(url, { headers: this.headers() }));
    });
  }

  private async post<T>(route: string, body: unknown): Promise<T> {
    const url = `${this.baseUrl}${route}`;
    const payload = JSON.stringify(body);
    return this.request(`POST ${url} ${payload}`, async () => {
      this.fetches += 1;
      return this.parse<T>(
        await this.fetchImpl(url, {
          method: "POST",
          headers: { ...this.headers(), "Content-Type": "application/json" },
          body: payload,
        }),
      );
    });
  }

  health(): Promise<HealthResponse> {
    return this.get("/health", {});
  }

  lookup(token: string, k: number, d: number): Promise<LookupResponse> {
    return this.get("/api/v1/lookup", { token, k, d });
  }

  normalize(text: string, k: number, d: number, topN: number): Promise<NormalizeResponse> {
    return this.post("/api/v1/normalize", { text, k, d, top_n: topN });
  }

  perturb(text: string, ratio: number, seed: number, k: number, d: number): Promise<PerturbResponse> {
    return this.post("/api/v1/perturb", { text, ratio, seed, k, d });
  }

  timeline(
    word: string,
    from: string,
    to: string,
    granularity: string,
    k: number,
    d: number,
  ): Promise<TimelineResponse> {
    return this.get("/api/v1/timeline", { word, from, to, granularity, k, d });
  }
}

/** Monotone counter per view; lets a view drop responses that arrive after
 * a newer request was issued. */
export class GenerationGate {
  private generation = 0;

  next(): number {
    this.generation += 1;
    return this.generation;
  }

  isCurrent(generation: number): boolean {
    return generation === this.generation;
  }
}
