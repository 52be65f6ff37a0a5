/** Typed client for the game service's HTTP+JSON endpoints. */

import type { BfResult, ClassifyResult, Hint, Mode, SessionState, StructureJson } from "./types.js";
import { validateHint, validateSession } from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly code: string,
    message: string,
    readonly status: number,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export interface CreateSessionRequest {
  left: StructureJson;
  right: StructureJson;
  clock: number;
  mode: Mode;
}

export interface ComputeBfRequest {
  left: StructureJson;
  right: StructureJson;
  n: number;
  direction?: "leq" | "geq" | "equiv";
  left_tuple?: number[];
  right_tuple?: number[];
}

type FetchFn = typeof fetch;

export class ApiClient {
  private readonly fetchFn: FetchFn;

  constructor(
    readonly baseUrl = "",
    fetchFn?: FetchFn,
  ) {
    this.fetchFn = fetchFn ?? ((...args) => fetch(...args));
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: {} };
    if (body !== undefined) {
      init.headers = { "Content-Type": "application/json" };
      init.body = JSON.stringify(body);
    }
    let response: Response;
    try {
      response = await this.fetchFn(`${this.baseUrl}${path}`, init);
    } catch (err) {
      throw new ApiError("unreachable", `service unreachable: ${String(err)}`, 0);
    }
    const text = await response.text();
    let payload: unknown = null;
    if (text) {
      try {
        payload = JSON.parse(text);
      } catch {
        payload = null;
      }
    }
    if (!response.ok) {
      const record = (payload ?? {}) as Record<string, unknown>;
      const code = typeof record.code === "string" ? record.code : `http-${response.status}`;
      const message =
        typeof record.message === "string"
          ? record.message
          : typeof record.detail === "string"
            ? record.detail
            : text || `HTTP ${response.status}`;
      throw new ApiError(code, message, response.status);
    }
    return payload as T;
  }

  async createSession(request: CreateSessionRequest): Promise<SessionState> {
    return validateSession(await this.request("POST", "/sessions", request));
  }

  async getSession(id: string): Promise<SessionState> {
    return validateSession(await this.request("GET", `/sessions/${id}`));
  }

  async postMove(id: string, move: number[]): Promise<SessionState> {
    return validateSession(await this.request("POST", `/sessions/${id}/moves`, { tuple: move }));
  }

  async getHint(id: string): Promise<Hint> {
    return validateHint(await this.request("GET", `/sessions/${id}/hint`));
  }

  async deleteSession(id: string): Promise<void> {
    await this.request("DELETE", `/sessions/${id}`);
  }

  async computeBf(request: ComputeBfRequest): Promise<BfResult> {
    return this.request("POST", "/compute/bf", request);
  }

  async computeClassify(formula: string): Promise<ClassifyResult> {
    return this.request("POST", "/compute/classify", { formula });
  }
}
