/** Thin typed client over the HTTP API. The fetch function is injectable so
 * tests replay recorded exchanges without a server. */

import type {
  AttributeGraph,
  Declaration,
  ExplainDoc,
  Mode,
  NodeProperties,
  QueryResponse,
  QuerySpec,
  RowPage,
  SessionSummary,
  TableSummary,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(public status: number, public body: unknown) {
    super(`API error ${status}`);
  }
}

export class Client {
  constructor(
    private baseUrl: string = "",
    private fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: {} };
    if (body !== undefined) {
      if (body instanceof FormData) {
        init.body = body;
      } else {
        init.headers = { "Content-Type": "application/json" };
        init.body = JSON.stringify(body);
      }
    }
    const resp = await this.fetchFn(this.baseUrl + path, init);
    const parsed = resp.status === 204 ? null : await resp.json();
    if (!resp.ok) {
      throw new ApiError(resp.status, parsed);
    }
    return parsed as T;
  }

  createSession(mode: Mode): Promise<{ session_id: string }> {
    return this.request("POST", "/sessions", { mode });
  }

  summary(sid: string): Promise<SessionSummary> {
    return this.request("GET", `/sessions/${sid}`);
  }

  uploadTable(sid: string, declaration: Declaration, csvText: string): Promise<TableSummary> {
    const form = new FormData();
    form.append("csv", new Blob([csvText], { type: "text/csv" }), `${declaration.name}.csv`);
    form.append("declaration", JSON.stringify(declaration));
    return this.request("POST", `/sessions/${sid}/tables`, form);
  }

  /** Runs one query; a rejection resolves (the verdict is the payload),
   * other errors throw. */
  async query(
    sid: string,
    spec: QuerySpec,
    inputs: string[],
    alias?: string,
    force?: boolean,
  ): Promise<QueryResponse> {
    try {
      return await this.request<QueryResponse>("POST", `/sessions/${sid}/query`, {
        spec,
        inputs,
        ...(alias ? { alias } : {}),
        ...(force ? { force } : {}),
      });
    } catch (err) {
      if (err instanceof ApiError && err.status === 422) {
        return err.body as QueryResponse;
      }
      throw err;
    }
  }

  rows(sid: string, node: string, limit = 100, offset = 0): Promise<RowPage> {
    return this.request("GET", `/sessions/${sid}/nodes/${node}/rows?limit=${limit}&offset=${offset}`);
  }

  properties(sid: string, node: string): Promise<NodeProperties> {
    return this.request("GET", `/sessions/${sid}/nodes/${node}/properties`);
  }

  explain(sid: string, node: string, attr: string): Promise<ExplainDoc> {
    return this.request("GET", `/sessions/${sid}/nodes/${node}/explain/${encodeURIComponent(attr)}`);
  }

  focus(sid: string, node: string): Promise<{ focus: string }> {
    return this.request("POST", `/sessions/${sid}/focus`, { node });
  }

  saveView(sid: string, name: string, node: string): Promise<{ view: string; node: string }> {
    return this.request("POST", `/sessions/${sid}/views`, { name, node });
  }

  graph(sid: string, dimension: string): Promise<AttributeGraph> {
    return this.request("GET", `/sessions/${sid}/graphs/${dimension}?format=json`);
  }
}
