/** Client-side session state: a cache of what the API said, never a second
 * source of truth. Mutations refetch the summary so rendering equals what a
 * fresh client would see. */

import { Client } from "./api.js";
import { suggestBacktrack } from "./builder.js";
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
  Verdict,
} from "./types.js";

export interface RejectionState {
  statement: string;
  verdict: Verdict;
  /** where the one-click shortcut jumps; server suggestion, else client walk */
  suggestion: string | null;
}

export interface BacktrackEdge {
  from: string;
  to: string;
}

export class SessionStore {
  sessionId: string | null = null;
  summary: SessionSummary | null = null;
  propsByNode = new Map<string, NodeProperties>();
  rowsByNode = new Map<string, RowPage>();
  graphs = new Map<string, AttributeGraph>();
  rejection: RejectionState | null = null;
  backtrackEdges: BacktrackEdge[] = [];

  constructor(private client: Client) {}

  private get sid(): string {
    if (!this.sessionId) throw new Error("no session yet");
    return this.sessionId;
  }

  async create(mode: Mode): Promise<void> {
    const { session_id } = await this.client.createSession(mode);
    this.sessionId = session_id;
  }

  async refresh(): Promise<SessionSummary> {
    this.summary = await this.client.summary(this.sid);
    return this.summary;
  }

  async uploadTable(declaration: Declaration, csvText: string): Promise<void> {
    await this.client.uploadTable(this.sid, declaration, csvText);
  }

  async loadProperties(node: string): Promise<NodeProperties> {
    const props = await this.client.properties(this.sid, node);
    this.propsByNode.set(node, props);
    return props;
  }

  async loadRows(node: string, limit = 100, offset = 0): Promise<RowPage> {
    const page = await this.client.rows(this.sid, node, limit, offset);
    this.rowsByNode.set(node, page);
    return page;
  }

  async loadGraph(dimension: string): Promise<AttributeGraph> {
    const g = await this.client.graph(this.sid, dimension);
    this.graphs.set(dimension, g);
    return g;
  }

  explain(node: string, attr: string): Promise<ExplainDoc> {
    return this.client.explain(this.sid, node, attr);
  }

  async runQuery(
    spec: QuerySpec,
    inputs: string[],
    alias?: string,
    force?: boolean,
  ): Promise<QueryResponse> {
    const resp = await this.client.query(this.sid, spec, inputs, alias, force);
    if (resp.verdict.outcome === "rejected") {
      const reason = resp.verdict.reason ?? {};
      let suggestion = reason.suggestion ?? null;
      if (!suggestion && this.summary && spec.op === "aggregate" && spec.fn && spec.attr) {
        suggestion = suggestBacktrack(
          this.summary, this.propsByNode, inputs[0] ?? "", spec.fn, spec.attr,
          spec.by ?? [],
        );
      }
      this.rejection = {
        statement: describeSpec(spec, inputs),
        verdict: resp.verdict,
        suggestion,
      };
    } else {
      this.rejection = null;
      await this.refresh();
    }
    return resp;
  }

  /** The rejection dialog's one-click jump to the suggested ancestor. */
  async jumpToSuggestion(): Promise<string | null> {
    if (!this.rejection?.suggestion) return null;
    return this.backtrack(this.rejection.suggestion);
  }

  async backtrack(node: string): Promise<string> {
    const from = this.summary?.focus ?? null;
    const { focus } = await this.client.focus(this.sid, node);
    if (from && from !== focus) {
      this.backtrackEdges.push({ from, to: focus });
    }
    await this.refresh();
    return focus;
  }
}

export function describeSpec(spec: QuerySpec, inputs: string[]): string {
  const from = inputs.length === 1 ? ` FROM ${inputs[0]}` : "";
  switch (spec.op) {
    case "aggregate":
      return `AGG ${spec.fn}(${spec.attr})${spec.as ? ` AS ${spec.as}` : ""} BY {${(spec.by ?? []).join(", ")}}${from}`;
    case "filter":
      return `FILTER …${from}`;
    case "project":
      return `PROJECT {${(spec.attrs ?? []).join(", ")}}${from}`;
    case "pivot":
      return `PIVOT ${spec.attr} OVER {${(spec.over ?? []).join(", ")}}${from}`;
    case "merge":
      return `MERGE ${(spec.kind ?? "left").toUpperCase()} ${inputs.join(" WITH ")}`;
    case "union":
      return `UNION ${inputs.join(" WITH ")}`;
    case "difference":
      return `DIFF ${inputs.join(" WITH ")}`;
    default:
      return spec.op;
  }
}
