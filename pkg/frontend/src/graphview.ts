/** Attribute-graph rendering: levels from the hierarchy edges, one SVG badge
 * per edge carrying its +/1/f label. Pure string output so tests run without
 * a DOM. */

import type { AttributeGraph } from "./types.js";

export interface PlacedNode {
  name: string;
  x: number;
  y: number;
}

export interface PlacedEdge {
  from: string;
  to: string;
  label: string;
}

export interface GraphLayout {
  width: number;
  height: number;
  nodes: PlacedNode[];
  edges: PlacedEdge[];
}

/** Longest-path layering over the non-sentinel edges. */
export function layoutGraph(graph: AttributeGraph): GraphLayout {
  const levels = new Map<string, number>();
  for (const a of graph.attributes) levels.set(a, 0);
  let changed = true;
  let guard = 0;
  while (changed && guard++ < 100) {
    changed = false;
    for (const e of graph.edges) {
      if (!levels.has(e.from) || !levels.has(e.to)) continue;
      const want = (levels.get(e.from) ?? 0) + 1;
      if ((levels.get(e.to) ?? 0) < want) {
        levels.set(e.to, want);
        changed = true;
      }
    }
  }
  const byLevel = new Map<number, string[]>();
  for (const a of graph.attributes) {
    const l = levels.get(a) ?? 0;
    if (!byLevel.has(l)) byLevel.set(l, []);
    byLevel.get(l)!.push(a);
  }
  const colWidth = 160;
  const rowHeight = 70;
  const maxPerLevel = Math.max(1, ...[...byLevel.values()].map((v) => v.length));
  const height = 40 + (Math.max(...byLevel.keys(), 0) + 1) * rowHeight;
  const nodes: PlacedNode[] = [];
  for (const [level, names] of byLevel) {
    names.forEach((name, i) => {
      nodes.push({
        name,
        x: 40 + i * colWidth + (maxPerLevel - names.length) * (colWidth / 2),
        y: height - 50 - level * rowHeight,
      });
    });
  }
  const edges = graph.edges
    .filter((e) => levels.has(e.from) && levels.has(e.to))
    .map((e) => ({ from: e.from, to: e.to, label: e.label }));
  return { width: 80 + maxPerLevel * colWidth, height, nodes, edges };
}

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderGraphSvg(graph: AttributeGraph): string {
  const layout = layoutGraph(graph);
  const at = new Map(layout.nodes.map((n) => [n.name, n]));
  const parts: string[] = [
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${layout.width} ${layout.height}" class="attr-graph" data-dimension="${esc(graph.dimension)}">`,
  ];
  for (const e of layout.edges) {
    const a = at.get(e.from)!;
    const b = at.get(e.to)!;
    const mx = (a.x + b.x) / 2;
    const my = (a.y + b.y) / 2;
    parts.push(
      `<line x1="${a.x}" y1="${a.y}" x2="${b.x}" y2="${b.y}" class="edge edge-${e.label === "+" ? "plus" : e.label}"/>`,
      `<text x="${mx}" y="${my - 4}" class="edge-label">${esc(e.label)}</text>`,
    );
  }
  for (const n of layout.nodes) {
    parts.push(
      `<rect x="${n.x - 55}" y="${n.y - 14}" width="110" height="28" rx="6" class="node"/>`,
      `<text x="${n.x}" y="${n.y + 4}" text-anchor="middle" class="node-label">${esc(n.name)}</text>`,
    );
  }
  parts.push("</svg>");
  return parts.join("\n");
}
