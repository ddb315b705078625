/** Query-builder logic: which aggregations the current properties permit.
 *
 * All correctness reasoning stays server-side; this mirrors the server's
 * validity gate over the property JSON it already returned, so the UI can
 * grey out exactly the options the API would reject.
 */

import type { NodeProperties, NodeSummary, QuerySpec, SessionSummary } from "./types.js";

const AGG_FNS = ["SUM", "AVG", "COUNT", "COUNTDISTINCT", "MIN", "MAX"] as const;

export function aggFunctions(): readonly string[] {
  return AGG_FNS;
}

function subset(small: Iterable<string>, big: Iterable<string>): boolean {
  const b = new Set(big);
  for (const s of small) {
    if (!b.has(s)) return false;
  }
  return true;
}

/** Dimension attributes a valid aggregate must keep: S_D − X − {attribute}. */
export function requiredGrouping(props: NodeProperties, attribute: string, x: string[]): string[] {
  return props.dimension_attributes.filter((d) => !x.includes(d) && d !== attribute);
}

export interface AggregationOption {
  fn: string;
  attribute: string;
  groupBy: string[];
  enabled: boolean;
  /** hover text; for disabled options the explanation of what is allowed */
  tooltip: string;
}

function bestProperty(props: NodeProperties, fn: string, attribute: string, groupBy: string[]) {
  const candidates = props.properties.filter(
    (p) => p.attribute === attribute && p.fn === fn,
  );
  if (candidates.length === 0) return { property: undefined, enabled: false };
  let best = candidates[0]!;
  let enabled = false;
  let bestOverlap = -1;
  for (const p of candidates) {
    if (subset(requiredGrouping(props, attribute, p.x), groupBy)) {
      enabled = true;
      return { property: p, enabled };
    }
    const overlap = p.x.filter((a) => groupBy.includes(a)).length;
    if (overlap > bestOverlap) {
      bestOverlap = overlap;
      best = p;
    }
  }
  return { property: best, enabled };
}

function resultName(spec: QuerySpec): string | undefined {
  if (spec.op !== "aggregate" || !spec.fn || !spec.attr) return undefined;
  return spec.as ?? `${spec.fn}(${spec.attr})`;
}

/**
 * Nearest ancestor where the attempted aggregation (or the roll-up intent it
 * re-aggregates) is expressible, mirrored from the server's suggestion walk
 * over the property documents the client has already fetched.
 */
export function suggestBacktrack(
  summary: SessionSummary,
  propsByNode: Map<string, NodeProperties>,
  startNode: string,
  fn: string,
  attribute: string,
  groupBy: string[],
): string | null {
  const byId = new Map<string, NodeSummary>(summary.nodes.map((n) => [n.id, n]));
  const ancestors: string[] = [];
  const queue = [startNode];
  while (queue.length > 0) {
    const ref = queue.shift()!;
    if (ancestors.includes(ref)) continue;
    ancestors.push(ref);
    const node = byId.get(ref);
    if (node) queue.push(...node.inputs);
  }
  const ordered = [
    ...ancestors.filter((r) => byId.has(r)).reverse(),
    ...ancestors.filter((r) => !byId.has(r)),
  ];

  const targets: { fn: string; attribute: string }[] = [{ fn, attribute }];
  for (const ref of ordered) {
    const node = byId.get(ref);
    if (node && resultName(node.spec) === attribute && node.spec.fn && node.spec.attr) {
      targets.push({ fn: node.spec.fn, attribute: node.spec.attr });
    }
  }
  for (const ref of ordered) {
    const props = propsByNode.get(ref);
    if (!props) continue;
    for (const t of targets) {
      const { enabled } = bestProperty(props, t.fn, t.attribute, groupBy);
      if (enabled) return ref;
    }
  }
  return null;
}

/** The option the picker renders for one (fn, attribute, group-by) choice. */
export function aggregationOption(
  props: NodeProperties,
  fn: string,
  attribute: string,
  groupBy: string[],
  suggestion?: string | null,
): AggregationOption {
  const { property, enabled } = bestProperty(props, fn, attribute, groupBy);
  let tooltip: string;
  if (enabled && property) {
    tooltip = `${fn}(${attribute}) is aggregable along {${[...property.x].sort().join(", ")}}`;
  } else if (property) {
    tooltip = `allowed along {${[...property.x].sort().join(", ")}}`;
    if (suggestion) tooltip += ` — backtrack to ${suggestion}`;
  } else {
    tooltip = `${fn} carries no aggregable property on ${attribute}`;
    if (suggestion) tooltip += ` — backtrack to ${suggestion}`;
  }
  return { fn, attribute, groupBy: [...groupBy], enabled, tooltip };
}

/** Every (fn, group-by) choice for one attribute; the UI greys the disabled
 * ones. Group-by candidates default to all subsets when the dimension count
 * is small, otherwise the required grouping and the full set. */
export function optionsForAttribute(
  props: NodeProperties,
  attribute: string,
  groupBys: string[][],
): AggregationOption[] {
  const out: AggregationOption[] = [];
  for (const fn of AGG_FNS) {
    for (const by of groupBys) {
      out.push(aggregationOption(props, fn, attribute, by));
    }
  }
  return out;
}
