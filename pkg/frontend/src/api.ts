/**
 * Thin typed client for the planning service.
 *
 * Every call goes through one injected fetch function so tests can record
 * the traffic; the client itself adds no caching and no computation.
 */

import type {
  AllocateRequest,
  AllocateResponse,
  AnalyzeRequest,
  AnalyzeResponse,
  ApiErrorBody,
  ForecastRequest,
  ForecastResponse,
  ScenarioDoc,
  ScenarioSummary,
} from "./types";

export type FetchLike = (
  input: string,
  init?: RequestInit,
) => Promise<Response>;

/** Service-reported failure, carrying the envelope fields verbatim. */
export class ServiceError extends Error {
  readonly status: number;
  readonly code: string;
  readonly details: unknown;

  constructor(status: number, body: ApiErrorBody) {
    super(body.message);
    this.status = status;
    this.code = body.code;
    this.details = body.details ?? null;
  }
}

async function throwEnvelope(res: Response): Promise<never> {
  let body: ApiErrorBody = { code: "http_error", message: res.statusText };
  try {
    body = (await res.json()) as ApiErrorBody;
  } catch {
    // non-JSON error body; keep the status text
  }
  throw new ServiceError(res.status, body);
}

export class ApiClient {
  readonly baseUrl: string;
  private readonly fetchFn: FetchLike;

  constructor(baseUrl: string, fetchFn?: FetchLike) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
    this.fetchFn = fetchFn ?? ((input, init) => fetch(input, init));
  }

  private async get<T>(path: string): Promise<T> {
    const res = await this.fetchFn(this.baseUrl + path);
    if (!res.ok) await throwEnvelope(res);
    return (await res.json()) as T;
  }

  private async send<T>(
    method: "POST" | "PUT",
    path: string,
    body: unknown,
  ): Promise<T> {
    const res = await this.fetchFn(this.baseUrl + path, {
      method,
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!res.ok) await throwEnvelope(res);
    return (await res.json()) as T;
  }

  analyze(req: AnalyzeRequest): Promise<AnalyzeResponse> {
    return this.send("POST", "/ahp/analyze", req);
  }

  allocate(req: AllocateRequest): Promise<AllocateResponse> {
    return this.send("POST", "/allocate", req);
  }

  forecast(req: ForecastRequest): Promise<ForecastResponse> {
    return this.send("POST", "/forecast", req);
  }

  listScenarios(): Promise<{ scenarios: ScenarioSummary[] }> {
    return this.get("/scenarios");
  }

  getScenario(id: string): Promise<ScenarioDoc> {
    return this.get(`/scenarios/${encodeURIComponent(id)}`);
  }

  createScenario(doc: ScenarioDoc): Promise<ScenarioDoc> {
    return this.send("PUT", "/scenarios", doc);
  }

  replaceScenario(id: string, doc: ScenarioDoc): Promise<ScenarioDoc> {
    return this.send("PUT", `/scenarios/${encodeURIComponent(id)}`, doc);
  }
}

/**
 * Per-panel request ordering. Each call takes a ticket; a response is
 * rendered only while its ticket is still the newest, so a slow older
 * reply can never overwrite a fresher one.
 */
export class RequestSequencer {
  private latest = 0;

  issue(): number {
    return ++this.latest;
  }

  isCurrent(ticket: number): boolean {
    return ticket === this.latest;
  }
}

/** Trailing-edge debounce; the returned function exposes cancel(). */
export function debounce<A extends unknown[]>(
  fn: (...args: A) => void,
  ms: number,
): ((...args: A) => void) & { cancel: () => void } {
  let timer: ReturnType<typeof setTimeout> | undefined;
  const wrapped = (...args: A) => {
    if (timer !== undefined) clearTimeout(timer);
    timer = setTimeout(() => {
      timer = undefined;
      fn(...args);
    }, ms);
  };
  wrapped.cancel = () => {
    if (timer !== undefined) clearTimeout(timer);
    timer = undefined;
  };
  return wrapped;
}
