"""Interactive sessions: a DAG of applied queries with propagated metadata,
accept/reject verdicts, explanations, backtracking and saved views."""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from . import engine, properties
from .engine import Aggregate, spec_to_json
from .errors import (
    DuplicateViewName,
    SummarGuardError,
    UnknownAttribute,
    UnknownInput,
    UnknownNode,
)
from .graph import AttributeGraph, discover
from .model import (
    AnalyticTable,
    DIMENSION_TABLE,
    DimensionBinding,
    FACT_TABLE,
    Schema,
    dump_csv,
    load_csv,
)
from .properties import (
    AggregableProperty,
    allowing_property,
    default_properties,
    properties_for,
    required_grouping,
)

ACCEPTED = "accepted"
REJECTED = "rejected"


@dataclass(frozen=True)
class Verdict:
    outcome: str
    reason: dict | None = None
    forced: bool = False

    @property
    def accepted(self) -> bool:
        return self.outcome == ACCEPTED

    def to_json(self) -> dict:
        d = {"outcome": self.outcome}
        if self.reason is not None:
            d["reason"] = self.reason
        if self.forced:
            d["forced"] = True
        return d


@dataclass
class QueryNode:
    id: str
    spec: object
    inputs: tuple[str, ...]
    result: AnalyticTable
    created_at: int
    verdict_log: list[Verdict] = field(default_factory=list)


class Session:
    """One analysis session. Mutations serialize through a single lock; reads
    of registered nodes are safe because tables are immutable."""

    def __init__(self, mode: str = properties.GSUM):
        if mode not in properties.MODES:
            raise ValueError(f"unknown mode {mode!r}")
        self.mode = mode
        self.base_tables: dict[str, AnalyticTable] = {}
        self.graphs: dict[str, AttributeGraph] = {}
        self.hierarchies: dict[str, dict] = {}
        self.property_overrides: dict[str, dict] = {}
        self.nodes: dict[str, QueryNode] = {}
        self.views: dict[str, str] = {}
        self.focus: str | None = None
        self._counter = 0
        self._lock = threading.Lock()

    # -- declarations -------------------------------------------------------

    def declare_dimension(self, name: str, csv_text: str,
                          parents: Mapping[str, Sequence[str]],
                          nullable: Mapping[str, bool] | None = None) -> AnalyticTable:
        with self._lock:
            table = load_csv(csv_text, name, DIMENSION_TABLE,
                             roles={}, categories={}, dimensions=(), nullable=nullable)
            graph = discover(table, parents)
            binding = graph.binding()
            schema = Schema(table.schema.attributes, (binding,))
            table = AnalyticTable(schema, table.rows, DIMENSION_TABLE, name,
                                  graphs={name: graph})
            self.graphs[name] = graph
            self.hierarchies[name] = {c: list(ps) for c, ps in parents.items()}
            self.base_tables[name] = table
            self.focus = name
            return table

    def declare_fact(self, name: str, csv_text: str,
                     dims: Mapping[str, Sequence[str]],
                     measures: Mapping[str, str],
                     overrides: Mapping[str, Mapping[str, Iterable[str]]] | None = None,
                     ) -> AnalyticTable:
        """``dims`` maps a declared dimension name to the fact attributes it
        contributes; ``measures`` maps measure attributes to categories."""
        with self._lock:
            bindings = []
            roles, categories, nullable = {}, {}, {}
            for dim_name, attrs in dims.items():
                g = self.graphs.get(dim_name)
                if g is None:
                    raise UnknownInput(f"dimension {dim_name!r} is not declared")
                bindings.append(g.binding(attrs))
                for a in attrs:
                    roles[a] = "dimension"
                    nullable[a] = g.nullable.get(a, False)
            for m, cat in measures.items():
                roles[m] = "measure"
                categories[m] = cat
            table = load_csv(csv_text, name, FACT_TABLE, roles=roles,
                             categories=categories, dimensions=tuple(bindings),
                             nullable=nullable)
            graphs = {d: self.graphs[d] for d in dims}
            table = table.with_metadata(graphs=graphs)
            props = default_properties(table, overrides or {})
            table = table.with_metadata(properties=props)
            self.property_overrides[name] = dict(overrides or {})
            self.base_tables[name] = table
            self.focus = name
            return table

    def set_property(self, table_name: str, attr: str,
                     x_d: Iterable[str] | None = None,
                     x_f: Iterable[str] | None = None) -> AggregableProperty:
        """Refine the declared determinant / forbidden set of a base-table
        attribute and recompute its default properties."""
        with self._lock:
            table = self.base_tables.get(table_name)
            if table is None:
                raise UnknownInput(f"unknown base table {table_name!r}")
            table.schema.attribute(attr)
            ov = self.property_overrides.setdefault(table_name, {})
            entry = dict(ov.get(attr, {}))
            if x_d is not None:
                entry["x_d"] = tuple(x_d)
            if x_f is not None:
                entry["x_f"] = tuple(x_f)
            ov[attr] = entry
            props = default_properties(table, ov)
            self.base_tables[table_name] = table.with_metadata(properties=props)
            return properties_for(self.base_tables[table_name], attr)[0]

    # -- resolution ---------------------------------------------------------

    def resolve(self, ref: str) -> AnalyticTable:
        if ref in self.nodes:
            return self.nodes[ref].result
        if ref in self.views:
            return self.nodes[self.views[ref]].result
        if ref in self.base_tables:
            return self.base_tables[ref]
        raise UnknownInput(f"unknown table or node {ref!r}")

    def _exists(self, ref: str) -> bool:
        return ref in self.nodes or ref in self.views or ref in self.base_tables

    # -- the gate -----------------------------------------------------------

    def _gate(self, spec: Aggregate, table: AnalyticTable, inputs) -> dict | None:
        """Validity of an aggregate against the input's properties; returns a
        rejection reason or None."""
        if not table.schema.has(spec.attr):
            raise UnknownAttribute(spec.attr, table.schema.names)
        ok = allowing_property(table, spec.fn, spec.attr, spec.by)
        if ok is not None:
            return None
        cands = properties_for(table, spec.attr, spec.fn)
        dims = set(table.schema.dimension_names)
        if cands:
            best = max(cands, key=lambda p: len(set(p.x) & set(spec.by)))
            allowed = sorted(best.x)
            required = sorted(required_grouping(table, best))
            rule = best.provenance
            pending = list(best.pending)
        else:
            allowed, required, rule, pending = [], sorted(dims - {spec.attr}), "no-property", []
        return {
            "attribute": spec.attr,
            "fn": spec.fn,
            "allowed_x": allowed,
            "required_grouping": required,
            "group_by": sorted(spec.by),
            "violated_rule": rule,
            "pending": pending,
            "suggestion": self._suggest(spec, inputs),
            "message": (
                f"{spec.fn}({spec.attr}) is aggregable along {{{', '.join(allowed)}}}; "
                f"grouping must keep {{{', '.join(required)}}}"
            ),
        }

    def _ancestors(self, refs: Sequence[str]) -> list[str]:
        """All ancestors of the given refs, newest first, base tables last."""
        seen: list[str] = []
        stack = list(refs)
        while stack:
            ref = stack.pop(0)
            if ref in seen:
                continue
            seen.append(ref)
            if ref in self.nodes:
                stack.extend(self.nodes[ref].inputs)
        nodes = [r for r in seen if r in self.nodes]
        nodes.sort(key=lambda r: -self.nodes[r].created_at)
        bases = [r for r in seen if r in self.base_tables]
        return nodes + bases

    def _suggest(self, spec: Aggregate, inputs: Sequence[str]) -> str | None:
        """Nearest ancestor where the attempted aggregation (or the intent it
        re-aggregates) is expressible."""
        targets = [(spec.fn, spec.attr)]
        for ref in self._ancestors(inputs):
            node = self.nodes.get(ref)
            if node and isinstance(node.spec, Aggregate) and \
                    node.spec.result_name == spec.attr:
                targets.append((node.spec.fn, node.spec.attr))
        for ref in self._ancestors(inputs):
            table = self.resolve(ref)
            for fn, attr in targets:
                if table.schema.has(attr) and \
                        allowing_property(table, fn, attr, spec.by):
                    return ref
        return None

    # -- applying queries ---------------------------------------------------

    def apply(self, spec, inputs: Sequence[str], alias: str | None = None,
              force: bool = False) -> tuple[str | None, Verdict]:
        with self._lock:
            if alias is not None and self._exists(alias):
                raise UnknownInput(f"name {alias!r} is already in use")
            tables = [self.resolve(ref) for ref in inputs]
            reason = None
            if isinstance(spec, Aggregate):
                reason = self._gate(spec, tables[0], inputs)
            if reason is not None and not force:
                return None, Verdict(REJECTED, reason)
            try:
                result = engine.run_spec(spec, tables)
                props = properties.propagate(spec, tables, result, self.mode)
            except SummarGuardError as exc:
                return None, Verdict(REJECTED, {
                    "message": str(exc), "error": type(exc).__name__,
                    "suggestion": None,
                })
            self._counter += 1
            node_id = alias or f"t{self._counter}"
            result = result.with_metadata(properties=props).renamed(node_id)
            verdict = Verdict(ACCEPTED, reason, forced=reason is not None)
            node = QueryNode(node_id, spec, tuple(inputs), result,
                             self._counter, [verdict])
            self.nodes[node_id] = node
            self.focus = node_id
            return node_id, verdict

    def backtrack(self, to: str) -> str:
        with self._lock:
            if not self._exists(to):
                raise UnknownNode(f"unknown node or view {to!r}")
            self.focus = self.views.get(to, to)
            return self.focus

    # -- inspection ---------------------------------------------------------

    def explain(self, ref: str, attr: str) -> dict:
        table = self.resolve(ref)
        if not table.schema.has(attr):
            raise UnknownAttribute(attr, table.schema.names)
        props = properties_for(table, attr)
        dims = set(table.schema.dimension_names)
        entries = []
        for p in props:
            removed = sorted(dims - set(p.x) - {attr})
            entries.append({
                **p.to_json(),
                "required_grouping": sorted(required_grouping(table, p)),
                "removed": {d: p.provenance for d in removed},
            })
        if props:
            fns = sorted({p.fn for p in props})
            xs = sorted(set().union(*(p.x for p in props)))
            narrative = (f"{attr} may be aggregated with {', '.join(fns)} "
                         f"along subsets of {{{', '.join(xs)}}}")
        else:
            narrative = f"{attr} carries no aggregable property; aggregation on it is rejected"
        return {"table": ref, "attribute": attr, "properties": entries,
                "narrative": narrative}

    def save_view(self, name: str, ref: str) -> None:
        with self._lock:
            if name in self.views or self._exists(name):
                raise DuplicateViewName(f"view name {name!r} is already in use")
            if ref not in self.nodes:
                raise UnknownNode(f"unknown node {ref!r}")
            self.views[name] = ref

    def query_tree(self, ref: str) -> dict:
        if ref in self.base_tables:
            return {"table": ref, "kind": self.base_tables[ref].kind}
        node = self.nodes.get(self.views.get(ref, ref))
        if node is None:
            raise UnknownNode(f"unknown node {ref!r}")
        return {
            "node": node.id,
            "spec": spec_to_json(node.spec),
            "inputs": [self.query_tree(i) for i in node.inputs],
        }

    def export(self, ref: str, path: str | Path) -> tuple[Path, Path]:
        """Write the node's rows as CSV plus a JSON sidecar carrying schema,
        properties and the defining query tree."""
        table = self.resolve(ref)
        path = Path(path)
        sidecar = path.with_suffix(path.suffix + ".meta.json")
        path.write_text(dump_csv(table), encoding="utf-8")
        sidecar.write_text(json.dumps(export_sidecar(self, ref, table),
                                      indent=2, sort_keys=True, ensure_ascii=False) + "\n",
                           encoding="utf-8")
        return path, sidecar


def export_sidecar(session: Session, ref: str, table: AnalyticTable) -> dict:
    return {
        "name": ref,
        "kind": table.kind,
        "schema": {
            "attributes": [
                {"name": a.name, "role": a.role, "category": a.category,
                 "nullable": a.nullable}
                for a in table.schema.attributes
            ],
            "dimensions": [
                {"name": b.name, "attributes": list(b.attributes),
                 "ancestor_pairs": sorted(map(list, b.ancestor_pairs))}
                for b in table.schema.dimensions
            ],
        },
        "properties": [p.to_json() for p in table.properties],
        "pending_actions": sorted({act for p in table.properties for act in p.pending}),
        "query": session.query_tree(ref),
    }


def read_export(path: str | Path) -> AnalyticTable:
    """Re-load an exported CSV + sidecar as a table with properties."""
    path = Path(path)
    sidecar = json.loads(path.with_suffix(path.suffix + ".meta.json").read_text("utf-8"))
    roles = {a["name"]: a["role"] for a in sidecar["schema"]["attributes"]}
    categories = {a["name"]: a["category"] for a in sidecar["schema"]["attributes"]}
    nullable = {a["name"]: a["nullable"] for a in sidecar["schema"]["attributes"]}
    bindings = tuple(
        DimensionBinding(b["name"], tuple(b["attributes"]),
                         frozenset((c, a) for c, a in b["ancestor_pairs"]))
        for b in sidecar["schema"]["dimensions"]
    )
    table = load_csv(path.read_text("utf-8"), sidecar["name"], sidecar["kind"],
                     roles=roles, categories=categories, dimensions=bindings,
                     nullable=nullable)
    props = tuple(AggregableProperty.from_json(p) for p in sidecar["properties"])
    return table.with_metadata(properties=props)
