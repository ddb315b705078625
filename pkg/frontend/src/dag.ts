/** Session-tree view model: layered DAG of base tables and query nodes, the
 * focus highlighted, dashed edges where the analyst backtracked. */

import type { SessionSummary } from "./types.js";
import type { BacktrackEdge } from "./store.js";

export interface DagNode {
  id: string;
  kind: "base" | "query";
  label: string;
  depth: number;
  focused: boolean;
  rejectedAttempts: number;
}

export interface DagEdge {
  from: string;
  to: string;
  style: "solid" | "dashed";
}

export interface DagView {
  nodes: DagNode[];
  edges: DagEdge[];
}

export function sessionDag(
  summary: SessionSummary,
  backtracks: BacktrackEdge[] = [],
): DagView {
  const depth = new Map<string, number>();
  for (const b of summary.base_tables) depth.set(b, 0);
  const nodes: DagNode[] = summary.base_tables.map((b) => ({
    id: b,
    kind: "base",
    label: b,
    depth: 0,
    focused: summary.focus === b,
    rejectedAttempts: 0,
  }));
  const edges: DagEdge[] = [];
  for (const n of summary.nodes) {
    const d = 1 + Math.max(0, ...n.inputs.map((i) => depth.get(i) ?? 0));
    depth.set(n.id, d);
    nodes.push({
      id: n.id,
      kind: "query",
      label: `${n.id} (${n.rows})`,
      depth: d,
      focused: summary.focus === n.id,
      rejectedAttempts: n.verdicts.filter((v) => v.outcome === "rejected" || v.forced).length,
    });
    for (const input of n.inputs) {
      edges.push({ from: input, to: n.id, style: "solid" });
    }
  }
  for (const b of backtracks) {
    edges.push({ from: b.from, to: b.to, style: "dashed" });
  }
  return { nodes, edges };
}
