/** Wire types mirroring the summar-guard HTTP API. */

export type Mode = "basic" | "sum" | "gsum";

export interface AggregableProperty {
  attribute: string;
  fn: string;
  x: string[];
  x_d: string[] | null;
  x_f: string[];
  pending: string[];
  provenance: string;
  note?: string;
}

export interface NodeProperties {
  table: string;
  dimension_attributes: string[];
  properties: AggregableProperty[];
}

export interface VerdictReason {
  attribute?: string;
  fn?: string;
  allowed_x?: string[];
  required_grouping?: string[];
  group_by?: string[];
  violated_rule?: string;
  pending?: string[];
  suggestion?: string | null;
  message?: string;
  error?: string;
}

export interface Verdict {
  outcome: "accepted" | "rejected";
  reason?: VerdictReason;
  forced?: boolean;
}

export interface QuerySpec {
  op: string;
  fn?: string;
  attr?: string;
  by?: string[];
  as?: string;
  over?: string[];
  kind?: string;
  on?: string[] | null;
  attrs?: string[];
  predicate?: unknown;
  calcs?: unknown[];
}

export interface NodeSummary {
  id: string;
  spec: QuerySpec;
  inputs: string[];
  rows: number;
  schema: string[];
  verdicts: Verdict[];
}

export interface SessionSummary {
  session_id: string;
  mode: Mode;
  base_tables: string[];
  nodes: NodeSummary[];
  views: Record<string, string>;
  focus: string | null;
}

export interface TableSummary {
  name: string;
  kind: string;
  rows: number;
  schema: { name: string; role: string; category: string; dimension: string | null }[];
}

export interface RowPage {
  columns: string[];
  rows: string[][];
  total: number;
  offset: number;
}

export interface GraphEdge {
  from: string;
  to: string;
  label: string;
}

export interface AttributeGraph {
  dimension: string;
  attributes: string[];
  edges: GraphEdge[];
}

export interface ExplainDoc {
  table: string;
  attribute: string;
  narrative: string;
  properties: (AggregableProperty & {
    required_grouping: string[];
    removed: Record<string, string>;
  })[];
}

export interface QueryResponse {
  node?: TableSummary;
  verdict: Verdict;
}

export interface Declaration {
  name: string;
  kind: "dimension" | "fact";
  hierarchy?: string[][];
  attrs?: string[];
  nullable?: string[];
  dims?: Record<string, string[]>;
  measures?: Record<string, string>;
  overrides?: Record<string, { x_d?: string[]; x_f?: string[] }>;
}
