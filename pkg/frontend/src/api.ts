/** Typed client for the veriodd HTTP API.
 *
 * The workbench never derives any logic itself: every formula, script,
 * and verdict rendered comes byte-for-byte from these endpoints.
 */

export interface ModuleInfo {
  name: string;
  references: string[];
}

export interface AttributeInfo {
  name: string;
  sort: string;
  unit?: string;
}

export interface ParseResponse {
  modules: ModuleInfo[];
  attributes: AttributeInfo[];
  observations?: { name: string; value: string }[];
}

export interface CompileResponse {
  oddText: string;
  codText?: string;
}

export interface CheckResponse {
  verdict: string;
  model: Record<string, string> | null;
  wallMs: number;
  script: string;
}

export interface DiagnosticInfo {
  severity: string;
  message: string;
  line: number;
  col: number;
  snippet: string;
}

export interface ApiErrorBody {
  code: string;
  message: string;
  diagnostics?: DiagnosticInfo[];
}

/** Error carrying the structured ApiError payload from the backend. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly body: ApiErrorBody,
  ) {
    super(body.message);
  }
}

/** Backend unreachable (network failure, not an HTTP error). */
export class BackendUnreachable extends Error {
  constructor(cause: unknown) {
    super(`backend unreachable: ${cause}`);
  }
}

export class ApiClient {
  constructor(readonly baseUrl: string) {}

  private async post<T>(path: string, payload: unknown, signal?: AbortSignal): Promise<T> {
    let response: Response;
    try {
      response = await fetch(this.baseUrl + path, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(payload),
        signal,
      });
    } catch (cause) {
      if (cause instanceof DOMException && cause.name === "AbortError") throw cause;
      throw new BackendUnreachable(cause);
    }
    if (!response.ok) {
      let body: ApiErrorBody;
      try {
        body = (await response.json()) as ApiErrorBody;
      } catch {
        body = { code: "HttpError", message: `${response.status} ${response.statusText}` };
      }
      throw new ApiError(response.status, body);
    }
    return (await response.json()) as T;
  }

  parse(odd: string, cod?: string, signal?: AbortSignal): Promise<ParseResponse> {
    return this.post("/api/parse", cod ? { odd, cod } : { odd }, signal);
  }

  compile(odd: string, target: "smtlib" | "prop", cod?: string, signal?: AbortSignal): Promise<CompileResponse> {
    return this.post("/api/compile", cod ? { odd, cod, target } : { odd, target }, signal);
  }

  check(odd: string, modules: string[], model: boolean, signal?: AbortSignal): Promise<CheckResponse> {
    return this.post("/api/check", { odd, modules, model }, signal);
  }

  verify(odd: string, cod: string, modules: string[], model: boolean, signal?: AbortSignal): Promise<CheckResponse> {
    return this.post("/api/verify", { odd, cod, modules, model }, signal);
  }

  async health(): Promise<boolean> {
    try {
      const response = await fetch(this.baseUrl + "/api/health");
      return response.ok;
    } catch {
      return false;
    }
  }
}
