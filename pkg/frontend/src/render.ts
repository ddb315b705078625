/** HTML renderers for the panels; pure string output, wired up in app.ts. */

import type { AggregationOption } from "./builder.js";
import type { DagView } from "./dag.js";
import type { RejectionState } from "./store.js";
import type { NodeProperties, RowPage } from "./types.js";

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderRows(page: RowPage, title: string): string {
  const head = page.columns.map((c) => `<th>${esc(c)}</th>`).join("");
  const body = page.rows
    .map((r) => `<tr>${r.map((v) => `<td>${esc(v)}</td>`).join("")}</tr>`)
    .join("\n");
  return `<h3>${esc(title)} <small>${page.total} rows</small></h3>
<table class="rows"><thead><tr>${head}</tr></thead><tbody>
${body}
</tbody></table>`;
}

export function renderProperties(props: NodeProperties): string {
  const rows = props.properties
    .map((p) => {
      const xd = p.x_d === null ? "—" : `{${p.x_d.join(", ")}}`;
      return `<tr><td>${esc(p.attribute)}</td><td>${esc(p.fn)}</td>` +
        `<td>{${p.x.join(", ")}}</td><td>${xd}</td>` +
        `<td>{${p.x_f.join(", ")}}</td><td>${esc(p.pending.join(", "))}</td>` +
        `<td title="${esc(p.note ?? "")}">${esc(p.provenance)}</td></tr>`;
    })
    .join("\n");
  return `<table class="props"><thead><tr><th>attribute</th><th>fn</th><th>aggregable along</th><th>x_d</th><th>x_f</th><th>pending</th><th>rule</th></tr></thead><tbody>
${rows}
</tbody></table>`;
}

export function renderOption(option: AggregationOption): string {
  const cls = option.enabled ? "agg-option" : "agg-option disabled";
  const disabled = option.enabled ? "" : " disabled";
  return `<button class="${cls}" title="${esc(option.tooltip)}"` +
    ` data-fn="${esc(option.fn)}" data-attr="${esc(option.attribute)}"` +
    ` data-by="${esc(option.groupBy.join(","))}"${disabled}>` +
    `${esc(option.fn)}(${esc(option.attribute)}) BY {${esc(option.groupBy.join(", "))}}</button>`;
}

export function renderRejection(state: RejectionState): string {
  const reason = state.verdict.reason ?? {};
  const allowed = `{${(reason.allowed_x ?? []).join(", ")}}`;
  const required = `{${(reason.required_grouping ?? []).join(", ")}}`;
  const jump = state.suggestion
    ? `<button class="jump" data-node="${esc(state.suggestion)}">backtrack to ${esc(state.suggestion)}</button>`
    : "";
  return `<div class="rejection" role="alertdialog">
<h3>Rejected</h3>
<p>${esc(state.statement)}</p>
<p>allowed along ${esc(allowed)}; grouping must keep ${esc(required)}</p>
<p>${esc(reason.message ?? "")}</p>
${jump}
</div>`;
}

export function renderDag(view: DagView): string {
  const nodes = view.nodes
    .map((n) => {
      const cls = ["dag-node", n.kind, n.focused ? "focused" : ""]
        .filter(Boolean)
        .join(" ");
      const badge = n.rejectedAttempts > 0 ? ` <span class="badge">${n.rejectedAttempts}</span>` : "";
      return `<div class="${cls}" data-node="${esc(n.id)}" style="--depth:${n.depth}">${esc(n.label)}${badge}</div>`;
    })
    .join("\n");
  const edges = view.edges
    .map((e) => `<div class="dag-edge ${e.style}" data-from="${esc(e.from)}" data-to="${esc(e.to)}"></div>`)
    .join("\n");
  return `<div class="dag">\n${nodes}\n${edges}\n</div>`;
}
