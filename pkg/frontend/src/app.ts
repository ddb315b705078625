/** Browser wiring: a read-mostly console over the HTTP API. All correctness
 * logic lives server-side (or in builder.ts mirroring returned metadata);
 * this file only renders state and forwards clicks. */

import { Client } from "./api.js";
import { aggFunctions, aggregationOption, requiredGrouping, suggestBacktrack } from "./builder.js";
import { sessionDag } from "./dag.js";
import { renderGraphSvg } from "./graphview.js";
import { renderDag, renderOption, renderProperties, renderRejection, renderRows } from "./render.js";
import { SessionStore } from "./store.js";
import type { Mode, QuerySpec } from "./types.js";

const apiBase = (document.querySelector("meta[name=api-base]") as HTMLMetaElement)?.content ?? "";
const store = new SessionStore(new Client(apiBase));

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

async function rerender(): Promise<void> {
  if (!store.summary) return;
  el("dag").innerHTML = renderDag(sessionDag(store.summary, store.backtrackEdges));
  const focus = store.summary.focus;
  if (focus) {
    if (!store.propsByNode.has(focus)) await store.loadProperties(focus);
    if (!store.rowsByNode.has(focus)) await store.loadRows(focus);
    el("rows").innerHTML = renderRows(store.rowsByNode.get(focus)!, focus);
    el("props").innerHTML = renderProperties(store.propsByNode.get(focus)!);
    renderBuilder(focus);
  }
  el("rejection").innerHTML = store.rejection ? renderRejection(store.rejection) : "";
  bindClicks();
}

function renderBuilder(focus: string): void {
  const props = store.propsByNode.get(focus);
  if (!props || !store.summary) {
    el("builder").innerHTML = "<em>load a table to build queries</em>";
    return;
  }
  const dims = props.dimension_attributes;
  const schema = store.summary.nodes.find((n) => n.id === focus)?.schema ??
    props.properties.map((p) => p.attribute);
  const attrs = [...new Set(schema)];
  const html: string[] = [];
  for (const attr of attrs) {
    const buttons: string[] = [];
    for (const fn of aggFunctions()) {
      const candidates = props.properties.filter((p) => p.attribute === attr && p.fn === fn);
      const minimal = candidates.length > 0
        ? requiredGrouping(props, attr, candidates[0]!.x)
        : dims.filter((d) => d !== attr);
      const suggestion = suggestBacktrack(store.summary, store.propsByNode, focus, fn, attr, minimal);
      buttons.push(renderOption(aggregationOption(props, fn, attr, minimal, suggestion)));
    }
    html.push(`<div class="attr-options"><strong>${attr}</strong> ${buttons.join(" ")}</div>`);
  }
  el("builder").innerHTML = html.join("\n");
}

function bindClicks(): void {
  for (const btn of document.querySelectorAll<HTMLButtonElement>("button.agg-option:not([disabled])")) {
    btn.onclick = async () => {
      const spec: QuerySpec = {
        op: "aggregate",
        fn: btn.dataset.fn!,
        attr: btn.dataset.attr!,
        by: btn.dataset.by ? btn.dataset.by.split(",").filter(Boolean) : [],
      };
      await store.runQuery(spec, [store.summary?.focus ?? ""]);
      await rerender();
    };
  }
  for (const btn of document.querySelectorAll<HTMLButtonElement>("button.jump")) {
    btn.onclick = async () => {
      await store.jumpToSuggestion();
      store.rejection = null;
      await rerender();
    };
  }
  for (const node of document.querySelectorAll<HTMLElement>(".dag-node")) {
    node.onclick = async () => {
      await store.backtrack(node.dataset.node!);
      await rerender();
    };
  }
}

async function showGraph(dimension: string): Promise<void> {
  const g = store.graphs.get(dimension) ?? (await store.loadGraph(dimension));
  el("graph").innerHTML = renderGraphSvg(g);
}

async function main(): Promise<void> {
  const mode = ((document.querySelector("meta[name=mode]") as HTMLMetaElement)?.content ?? "gsum") as Mode;
  await store.create(mode);
  await store.refresh();
  el("graph-form").onsubmit = async (ev) => {
    ev.preventDefault();
    const dim = (el<HTMLInputElement>("graph-dim")).value;
    if (dim) await showGraph(dim);
  };
  await rerender();
}

main().catch((err) => {
  el("rejection").textContent = `offline: ${err}`;
});
