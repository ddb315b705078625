"""Labelled attribute graphs over dimension tables.

Edge labels encode what the data supports: ``f`` a literal functional
dependency, ``1`` a dependency among non-null values only, ``+`` neither.
Closures (literal determination) traverse ``f`` edges only.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .errors import InvalidHierarchy, UnknownAttribute
from .model import (
    AnalyticTable,
    DIMENSION_TABLE,
    DimensionBinding,
    Schema,
    hierarchy_ancestor_pairs,
    lfd_holds,
    nfd_holds,
)

BOTTOM = "⊥"
TOP = "⊤"

F = "f"
ONE = "1"
PLUS = "+"


@dataclass(frozen=True)
class AttributeGraph:
    dimension: str
    attributes: tuple[str, ...]  # in schema order
    edges: tuple[tuple[str, str, str], ...]  # (from, to, label), includes sentinel edges
    parents: Mapping[str, tuple[str, ...]]  # declared child -> parents
    nullable: Mapping[str, bool]

    @property
    def ancestor_pairs(self) -> frozenset[tuple[str, str]]:
        return hierarchy_ancestor_pairs({c: list(ps) for c, ps in self.parents.items()})

    def label(self, a: str, b: str) -> str | None:
        for u, v, lab in self.edges:
            if u == a and v == b:
                return lab
        return None

    def f_reachable(self, start: Iterable[str]) -> set[str]:
        """Attributes literally determined by ``start`` through f-edges."""
        succ: dict[str, list[str]] = {}
        for u, v, lab in self.edges:
            if lab == F and u not in (BOTTOM,) and v not in (TOP,):
                succ.setdefault(u, []).append(v)
        seen = set(a for a in start if a in self.attributes)
        frontier = list(seen)
        while frontier:
            n = frontier.pop()
            for m in succ.get(n, ()):
                if m not in seen:
                    seen.add(m)
                    frontier.append(m)
        return seen

    def binding(self, present: Iterable[str] | None = None) -> DimensionBinding:
        """The footprint of this dimension over ``present`` attribute names."""
        present = set(present) if present is not None else set(self.attributes)
        attrs = tuple(a for a in self.attributes if a in present)
        pairs = frozenset((a, b) for a, b in self.ancestor_pairs
                          if a in present and b in present)
        return DimensionBinding(self.dimension, attrs, pairs)

    def to_dot(self) -> str:
        lines = [f'digraph "{self.dimension}" {{', "  rankdir=BT;"]
        for n in (BOTTOM, *self.attributes, TOP):
            shape = "point" if n in (BOTTOM, TOP) else "box"
            lines.append(f'  "{n}" [shape={shape}];')
        for u, v, lab in self.edges:
            lines.append(f'  "{u}" -> "{v}" [label="{lab}"];')
        lines.append("}")
        return "\n".join(lines)

    def to_json(self) -> dict:
        return {
            "dimension": self.dimension,
            "attributes": list(self.attributes),
            "edges": [{"from": u, "to": v, "label": lab} for u, v, lab in self.edges],
        }


def _dependency_label(table: AnalyticTable, a: str, b: str) -> str:
    if lfd_holds(table, [a], [b]):
        return F
    if nfd_holds(table, [a], [b]):
        return ONE
    return PLUS


def discover(table: AnalyticTable, parents: Mapping[str, Sequence[str]]) -> AttributeGraph:
    """Build the attribute graph of a dimension table.

    ``parents`` maps each attribute to its parents in the hierarchy (child
    below parent). Besides one edge per declared parent-child pair, a skip
    edge is added for every ancestor pair whose intermediate attributes on
    some hierarchy path are all nullable; each edge is labelled by testing
    the literal then the null-tolerant dependency on the data.
    """
    if table.kind != DIMENSION_TABLE:
        raise InvalidHierarchy(f"{table.name or 'table'} is not a dimension table")
    attrs = list(table.schema.names)
    parents = {c: tuple(ps) for c, ps in parents.items() if ps}
    for c, ps in parents.items():
        for n in (c, *ps):
            if n not in attrs:
                raise UnknownAttribute(n, attrs)
    ancestors = hierarchy_ancestor_pairs({c: list(ps) for c, ps in parents.items()})
    covered = set()
    for c, ps in parents.items():
        covered.add(c)
        covered.update(ps)
    if len(attrs) > 1 and set(attrs) - covered:
        missing = sorted(set(attrs) - covered)
        raise InvalidHierarchy(f"hierarchy does not cover attributes {missing}")

    nullable = {a.name: a.nullable for a in table.schema.attributes}

    edges: list[tuple[str, str, str]] = []
    adjacent = set()
    for c, ps in parents.items():
        for p in ps:
            adjacent.add((c, p))
            edges.append((c, p, _dependency_label(table, c, p)))

    # skip edges: ancestor pairs with some hierarchy path whose strictly
    # intermediate attributes are all nullable
    def nullable_route(a: str, b: str) -> bool:
        for p in parents.get(a, ()):
            if p == b:
                return True
            if (p, b) in ancestors and nullable.get(p, False) and nullable_route(p, b):
                return True
        return False

    for a, b in sorted(ancestors):
        if (a, b) in adjacent:
            continue
        via = [p for p in parents.get(a, ())
               if p != b and (p, b) in ancestors and nullable.get(p, False)]
        if any(nullable_route(p, b) for p in via):
            edges.append((a, b, _dependency_label(table, a, b)))

    bottoms = [a for a in attrs if not any(a in ps for ps in parents.values())]
    tops = [a for a in attrs if not parents.get(a)]
    for a in bottoms:
        edges.append((BOTTOM, a, PLUS))
    for a in tops:
        edges.append((a, TOP, F))

    order = {a: i for i, a in enumerate(attrs)}
    edges.sort(key=lambda e: (order.get(e[0], -1), order.get(e[1], len(order))))
    return AttributeGraph(
        dimension=table.name,
        attributes=tuple(attrs),
        edges=tuple(edges),
        parents=parents,
        nullable=nullable,
    )


def closure(
    graphs: Iterable[AttributeGraph],
    x: Iterable[str],
    present: Iterable[str] | None = None,
) -> set[str]:
    """X⁺: attributes literally determined by X across the given graphs.

    Matching is by name so a merge result whose State column came from the
    joined table is still reached through the original dimension's graph.
    When ``present`` is given the result is clipped to those names.
    """
    x = set(x)
    out = set(x)
    for g in graphs:
        out |= g.f_reachable(x)
    if present is not None:
        out &= set(present) | x
    return out


def dimension_identifier(
    graph: AttributeGraph, within: Sequence[str] | None = None
) -> tuple[str, ...]:
    """Minimum-cardinality attribute set whose closure covers ``within``
    (default: the whole dimension); ties break toward leftmost attributes."""
    attrs = [a for a in graph.attributes if within is None or a in within]
    target = set(attrs)
    if not attrs:
        return ()
    for size in range(1, len(attrs) + 1):
        for combo in combinations(attrs, size):
            if target <= closure([graph], combo):
                return combo
    return tuple(attrs)


def fact_identifier(schema: Schema, graphs: Mapping[str, AttributeGraph]) -> set[str]:
    """Default determinant of a fact table: the union of per-dimension
    identifiers over the attributes present in the schema."""
    out: set[str] = set()
    dim_names = set(schema.dimension_names)
    for binding in schema.dimensions:
        present = [a for a in binding.attributes if a in dim_names]
        if not present:
            continue
        g = graphs.get(binding.name)
        if g is None:
            out.update(present)
        else:
            out.update(dimension_identifier(g, present))
    return out


def _label_paths(graph: AttributeGraph, a: str, b: str, allowed: set[str]) -> set[tuple[str, ...]]:
    succ: dict[str, list[tuple[str, str]]] = {}
    for u, v, lab in graph.edges:
        if u in allowed and v in allowed:
            succ.setdefault(u, []).append((v, lab))
    paths: set[tuple[str, ...]] = set()

    def walk(node, labels, visited):
        for v, lab in succ.get(node, ()):
            if v in visited:
                continue
            if v == b:
                paths.add(tuple(labels + [lab]))
            else:
                walk(v, labels + [lab], visited | {v})

    walk(a, [], {a})
    return paths


def same_labelled_paths(
    g1: AttributeGraph, g2: AttributeGraph, common: Iterable[str]
) -> bool:
    """True when every pair of common attributes is connected by identical
    labelled paths (restricted to common attributes) in both graphs, or by
    no path in either."""
    common = set(common)
    for a in common:
        for b in common:
            if a == b:
                continue
            if _label_paths(g1, a, b, common) != _label_paths(g2, a, b, common):
                return False
    return True


def highest(schema: Schema, y: Iterable[str]) -> list[str]:
    """Yᵗᵒᵖ: members of Y with no ancestor in Y within any of their dimensions."""
    y = set(y)
    out = []
    for name in schema.in_schema_order(y):
        dominated = False
        for binding in schema.dimensions:
            for child, anc in binding.ancestor_pairs:
                if child == name and anc in y and anc != name:
                    dominated = True
                    break
            if dominated:
                break
        if not dominated:
            out.append(name)
    return out
