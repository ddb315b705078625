"""The seven analytic operators with literal null semantics.

Operators are pure functions from tables to tables; aggregable-property
propagation happens one layer up, so results leave with empty properties.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from typing import Sequence

from . import funcs
from .errors import (
    AmbiguousPivotCell,
    MissingDimensionAttribute,
    NoCommonDimensionAttributes,
    NonDimensionGrouping,
    SchemaMismatch,
    UnionDimensionOverlap,
    UnknownAttribute,
)
from .graph import same_labelled_paths
from .model import (
    AnalyticTable,
    AttributeDef,
    FACT_TABLE,
    MEASURE,
    NUM,
    STAT,
    Schema,
)

logger = logging.getLogger(__name__)

LEFT = "left"
RIGHT = "right"
FULL = "full"
STRICT = "strict"
MERGE_KINDS = (LEFT, RIGHT, FULL, STRICT)


# ---------------------------------------------------------------------------
# predicates
# ---------------------------------------------------------------------------

LITERAL_IS = "is"
COMPARATORS = ("=", "!=", "<", "<=", ">", ">=", LITERAL_IS)


@dataclass(frozen=True)
class Comparison:
    attr: str
    op: str
    value: object = None  # constant (str/Decimal/None) when other_attr is None
    other_attr: str | None = None

    def attributes(self):
        return {self.attr} | ({self.other_attr} if self.other_attr else set())


@dataclass(frozen=True)
class Not:
    child: object

    def attributes(self):
        return self.child.attributes()


@dataclass(frozen=True)
class And:
    left: object
    right: object

    def attributes(self):
        return self.left.attributes() | self.right.attributes()


@dataclass(frozen=True)
class Or:
    left: object
    right: object

    def attributes(self):
        return self.left.attributes() | self.right.attributes()


def _coerce(value, category):
    if value is None or not isinstance(value, str):
        return value
    if category in (NUM, STAT):
        try:
            return Decimal(value)
        except InvalidOperation:
            return value
    return value


def _eval_atom(atom: Comparison, table: AnalyticTable, row) -> bool:
    left = row[table.schema.index(atom.attr)]
    cat = table.schema.attribute(atom.attr).category
    if atom.other_attr is not None:
        right = row[table.schema.index(atom.other_attr)]
    else:
        right = _coerce(atom.value, cat)
    if atom.op == LITERAL_IS:
        return (left is None and right is None) or left == right
    if left is None or right is None:
        return False  # any non-literal comparison with a null is false
    try:
        if atom.op == "=":
            return left == right
        if atom.op == "!=":
            return left != right
        if atom.op == "<":
            return left < right
        if atom.op == "<=":
            return left <= right
        if atom.op == ">":
            return left > right
        if atom.op == ">=":
            return left >= right
    except TypeError:
        return False
    raise ValueError(f"unknown comparator {atom.op!r}")


def eval_predicate(pred, table: AnalyticTable, row) -> bool:
    if isinstance(pred, Comparison):
        return _eval_atom(pred, table, row)
    if isinstance(pred, Not):
        return not eval_predicate(pred.child, table, row)
    if isinstance(pred, And):
        return eval_predicate(pred.left, table, row) and eval_predicate(pred.right, table, row)
    if isinstance(pred, Or):
        return eval_predicate(pred.left, table, row) or eval_predicate(pred.right, table, row)
    raise ValueError(f"not a predicate: {pred!r}")


# ---------------------------------------------------------------------------
# projection expressions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: Decimal

    def attributes(self):
        return set()


@dataclass(frozen=True)
class Ref:
    name: str

    def attributes(self):
        return {self.name}


@dataclass(frozen=True)
class BinOp:
    op: str  # + - * /
    left: object
    right: object

    def attributes(self):
        return self.left.attributes() | self.right.attributes()


def eval_expr(expr, table: AnalyticTable, row):
    if isinstance(expr, Num):
        return expr.value
    if isinstance(expr, Ref):
        return row[table.schema.index(expr.name)]
    if isinstance(expr, BinOp):
        left = eval_expr(expr.left, table, row)
        right = eval_expr(expr.right, table, row)
        if left is None or right is None:
            return None
        if expr.op == "+":
            return left + right
        if expr.op == "-":
            return left - right
        if expr.op == "*":
            return left * right
        if expr.op == "/":
            if right == 0:
                logger.warning("division by zero yields null")
                return None
            return left / right
    raise ValueError(f"not an expression: {expr!r}")


# ---------------------------------------------------------------------------
# query specs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Filter:
    predicate: object


@dataclass(frozen=True)
class Project:
    attrs: tuple[str, ...]
    calcs: tuple[tuple[object, str], ...] = ()  # (expression, new name)


@dataclass(frozen=True)
class Aggregate:
    fn: str
    attr: str
    by: tuple[str, ...]
    alias: str | None = None

    @property
    def result_name(self) -> str:
        return self.alias or f"{self.fn}({self.attr})"


@dataclass(frozen=True)
class Pivot:
    attr: str
    over: tuple[str, ...]


@dataclass(frozen=True)
class Merge:
    kind: str
    on: tuple[str, ...] | None = None


@dataclass(frozen=True)
class Union:
    pass


@dataclass(frozen=True)
class Difference:
    pass


QuerySpec = (Filter, Project, Aggregate, Pivot, Merge, Union, Difference)


# ---------------------------------------------------------------------------
# operators
# ---------------------------------------------------------------------------


def filter_table(table: AnalyticTable, predicate) -> AnalyticTable:
    table.schema.check_attrs(predicate.attributes())
    rows = tuple(r for r in table.rows if eval_predicate(predicate, table, r))
    return AnalyticTable(table.schema, rows, FACT_TABLE, graphs=table.graphs)


def project(table: AnalyticTable, attrs: Sequence[str], calcs=()) -> AnalyticTable:
    table.schema.check_attrs(attrs)
    keep = set(attrs)
    missing = [d for d in table.schema.dimension_names if d not in keep]
    if missing:
        raise MissingDimensionAttribute(
            f"projection must keep all dimension attributes, missing {missing}"
        )
    kept_defs = [a for a in table.schema.attributes if a.name in keep]
    new_defs = []
    for expr, new_name in calcs:
        table.schema.check_attrs(expr.attributes())
        if any(d.name == new_name for d in kept_defs + new_defs):
            raise SchemaMismatch(f"calculated attribute {new_name!r} collides")
        new_defs.append(AttributeDef(new_name, MEASURE, NUM, True))
    bindings = tuple(b.restricted(keep) for b in table.schema.dimensions)
    schema = Schema(tuple(kept_defs + new_defs), bindings)
    kept_idx = [table.schema.index(d.name) for d in kept_defs]
    rows = []
    for r in table.rows:
        vals = [r[i] for i in kept_idx]
        vals.extend(eval_expr(expr, table, r) for expr, _ in calcs)
        rows.append(tuple(vals))
    return AnalyticTable(schema, tuple(rows), FACT_TABLE, graphs=table.graphs)


def aggregate(table: AnalyticTable, fn: str, attr: str, by: Sequence[str],
              alias: str | None = None) -> AnalyticTable:
    table.schema.check_attrs([attr, *by])
    dims = set(table.schema.dimension_names)
    bad = [b for b in by if b not in dims]
    if bad:
        raise NonDimensionGrouping(f"group-by attributes must be dimensions: {bad}")
    by = table.schema.in_schema_order(by)
    name = alias or f"{fn}({attr})"
    if name in by:
        raise SchemaMismatch(f"aggregate name {name!r} collides with a group-by attribute")
    src = table.schema.attribute(attr)
    out_cat = funcs.codomain_category(fn, src.category)

    by_idx = [table.schema.index(b) for b in by]
    a_idx = table.schema.index(attr)
    groups: dict[tuple, list] = {}
    order: list[tuple] = []
    for r in table.rows:
        key = tuple(r[i] for i in by_idx)
        if key not in groups:
            groups[key] = []
            order.append(key)
        groups[key].append(r[a_idx])

    defs = [table.schema.attribute(b) for b in by]
    defs.append(AttributeDef(name, MEASURE, out_cat, True))
    bindings = tuple(b.restricted(set(by)) for b in table.schema.dimensions
                     if set(b.attributes) & set(by))
    schema = Schema(tuple(defs), bindings)
    rows = tuple(key + (funcs.apply_fn(fn, groups[key]),) for key in order)
    return AnalyticTable(schema, rows, FACT_TABLE, graphs=table.graphs)


def pivot(table: AnalyticTable, attr: str, over: Sequence[str]) -> AnalyticTable:
    table.schema.check_attrs([attr, *over])
    dims = list(table.schema.dimension_names)
    bad = [a for a in over if a not in dims]
    if bad:
        raise NonDimensionGrouping(f"pivot attributes must be dimensions: {bad}")
    if table.schema.attribute(attr).role != MEASURE:
        raise SchemaMismatch(f"pivoted attribute {attr!r} must be a measure")
    over = table.schema.in_schema_order(over)
    residual = [d for d in dims if d not in over]
    if not residual:
        raise SchemaMismatch("pivot attributes must be a proper subset of the dimension attributes")

    over_idx = [table.schema.index(a) for a in over]
    res_idx = [table.schema.index(a) for a in residual]
    a_idx = table.schema.index(attr)

    pivot_tuples: list[tuple] = []
    for r in table.rows:
        v = tuple(r[i] for i in over_idx)
        if v not in pivot_tuples:
            pivot_tuples.append(v)

    def colname(v: tuple) -> str:
        parts = ["NULL" if x is None else str(x) for x in v]
        return "_".join([attr, *parts])

    columns = [colname(v) for v in pivot_tuples]
    if len(set(columns)) != len(columns):
        raise AmbiguousPivotCell("distinct pivot tuples render to the same column name")
    for c in columns:
        if c in residual:
            raise SchemaMismatch(f"pivot column {c!r} collides with an existing attribute")

    src = table.schema.attribute(attr)
    defs = [table.schema.attribute(a) for a in residual]
    defs.extend(AttributeDef(c, MEASURE, src.category, True) for c in columns)
    bindings = tuple(b.restricted(set(residual)) for b in table.schema.dimensions
                     if set(b.attributes) & set(residual))
    schema = Schema(tuple(defs), bindings)

    col_of = {v: len(residual) + i for i, v in enumerate(pivot_tuples)}
    out_rows: dict[tuple, list] = {}
    order: list[tuple] = []
    filled: set[tuple[tuple, int]] = set()
    for r in table.rows:
        key = tuple(r[i] for i in res_idx)
        if key not in out_rows:
            out_rows[key] = list(key) + [None] * len(pivot_tuples)
            order.append(key)
        j = col_of[tuple(r[i] for i in over_idx)]
        if (key, j) in filled:
            raise AmbiguousPivotCell(
                f"two rows feed pivot cell {schema.names[j]!r} for key {key}"
            )
        filled.add((key, j))
        out_rows[key][j] = r[a_idx]
    rows = tuple(tuple(out_rows[k]) for k in order)
    return AnalyticTable(schema, rows, FACT_TABLE, graphs=table.graphs)


def common_dimension_attributes(left: AnalyticTable, right: AnalyticTable) -> list[str]:
    rdims = set(right.schema.dimension_names)
    return [a for a in left.schema.dimension_names if a in rdims]


def _merged_dimension_output(left, right, on) -> bool:
    """Def of merge, item 2: keep common attributes once only when every pair
    shared across two different dimensions is connected by the same labelled
    paths in both attribute graphs."""
    for bl in left.schema.dimensions:
        for br in right.schema.dimensions:
            if bl.name == br.name:
                continue
            common = [a for a in on if a in bl.attributes and a in br.attributes]
            if len(common) < 2:
                continue
            gl = left.graphs.get(bl.name)
            gr = right.graphs.get(br.name)
            if gl is None or gr is None:
                continue
            if not same_labelled_paths(gl, gr, common):
                return False
    return True


def merge(kind: str, left: AnalyticTable, right: AnalyticTable,
          on: Sequence[str] | None = None) -> AnalyticTable:
    if kind not in MERGE_KINDS:
        raise ValueError(f"unknown merge kind {kind!r}")
    if on is None:
        on = common_dimension_attributes(left, right)
        if not on:
            raise NoCommonDimensionAttributes(
                f"{left.name or 'left'} and {right.name or 'right'} share no dimension attributes"
            )
    else:
        on = list(on)
        ldims = set(left.schema.dimension_names)
        rdims = set(right.schema.dimension_names)
        for a in on:
            if a not in ldims or a not in rdims:
                raise UnknownAttribute(a, sorted(ldims & rdims))

    shared = _merged_dimension_output(left, right, on)
    overlap = set(left.schema.names) & set(right.schema.names)

    if shared:
        rename_left: dict[str, str] = {}
        rename_right = {n: f"{n}@right" for n in overlap - set(on)}
        right_only = [a for a in right.schema.attributes if a.name not in set(on)]
    else:
        rename_left = {n: f"{n}@left" for n in overlap}
        rename_right = {n: f"{n}@right" for n in overlap}
        right_only = list(right.schema.attributes)

    out_defs = []
    for a in left.schema.attributes:
        nm = rename_left.get(a.name, a.name)
        out_defs.append(AttributeDef(nm, a.role, a.category, True, a.dimension))
    for a in right_only:
        nm = rename_right.get(a.name, a.name)
        out_defs.append(AttributeDef(nm, a.role, a.category, True, a.dimension))

    bindings: dict[str, object] = {}
    for b in left.schema.dimensions:
        bindings[b.name] = b.restricted(set(left.schema.names), rename_left)
    keep_right = {a.name for a in right_only} | (set(on) if shared else set())
    for b in right.schema.dimensions:
        rb = b.restricted(keep_right, rename_right)
        if b.name in bindings:
            prev = bindings[b.name]
            merged_attrs = tuple(dict.fromkeys(prev.attributes + rb.attributes))
            bindings[b.name] = type(prev)(b.name, merged_attrs,
                                          prev.ancestor_pairs | rb.ancestor_pairs)
        else:
            bindings[b.name] = rb
    schema = Schema(tuple(out_defs), tuple(bindings.values()))

    lon = [left.schema.index(a) for a in on]
    ron = [right.schema.index(a) for a in on]
    rindex: dict[tuple, list] = {}
    for r in right.rows:
        rindex.setdefault(tuple(r[i] for i in ron), []).append(r)

    right_cols = ([i for i, a in enumerate(right.schema.attributes)
                   if a.name not in set(on)]
                  if shared else list(range(len(right.schema.attributes))))

    preserve_left = kind in (LEFT, FULL)
    preserve_right = kind in (RIGHT, FULL)
    rows = []
    for lrow in left.rows:
        key = tuple(lrow[i] for i in lon)
        matches = rindex.get(key, [])
        if matches:
            for rrow in matches:
                rows.append(lrow + tuple(rrow[i] for i in right_cols))
        elif preserve_left:
            rows.append(lrow + (None,) * len(right_cols))
    if preserve_right:
        lefts_by_key = {tuple(l[i] for i in lon) for l in left.rows}
        pad_left = [None] * len(left.schema.attributes)
        for rrow in right.rows:
            key = tuple(rrow[i] for i in ron)
            if key in lefts_by_key:
                continue
            padded = list(pad_left)
            if shared:
                for j, a in enumerate(on):
                    padded[left.schema.index(a)] = rrow[ron[j]]
            rows.append(tuple(padded) + tuple(rrow[i] for i in right_cols))

    graphs = dict(left.graphs)
    graphs.update(right.graphs)
    return AnalyticTable(schema, tuple(rows), FACT_TABLE, graphs=graphs)


def _check_same_schema(a: AnalyticTable, b: AnalyticTable) -> None:
    if a.schema.names != b.schema.names:
        raise SchemaMismatch(f"schemas differ: {a.schema.names} vs {b.schema.names}")
    for x, y in zip(a.schema.attributes, b.schema.attributes):
        if (x.role, x.category) != (y.role, y.category):
            raise SchemaMismatch(f"attribute {x.name!r} differs in role or category")
    if {d.name for d in a.schema.dimensions} != {d.name for d in b.schema.dimensions}:
        raise SchemaMismatch("tables refer to different dimensions")


def union(a: AnalyticTable, b: AnalyticTable) -> AnalyticTable:
    _check_same_schema(a, b)
    dims = list(a.schema.dimension_names)
    overlap = a.distinct_tuples(dims) & b.distinct_tuples(dims)
    if overlap:
        raise UnionDimensionOverlap(overlap)
    rows = []
    seen = set()
    for r in a.rows + b.rows:
        if r not in seen:
            seen.add(r)
            rows.append(r)
    graphs = dict(a.graphs)
    graphs.update(b.graphs)
    return AnalyticTable(a.schema, tuple(rows), FACT_TABLE, graphs=graphs)


def difference(a: AnalyticTable, b: AnalyticTable) -> AnalyticTable:
    _check_same_schema(a, b)
    drop = set(b.rows)
    rows = []
    seen = set()
    for r in a.rows:
        if r not in drop and r not in seen:
            seen.add(r)
            rows.append(r)
    graphs = dict(a.graphs)
    graphs.update(b.graphs)
    return AnalyticTable(a.schema, tuple(rows), FACT_TABLE, graphs=graphs)


def run_spec(spec, inputs: Sequence[AnalyticTable]) -> AnalyticTable:
    """Execute one QuerySpec against resolved input tables."""
    if isinstance(spec, Filter):
        return filter_table(inputs[0], spec.predicate)
    if isinstance(spec, Project):
        return project(inputs[0], spec.attrs, spec.calcs)
    if isinstance(spec, Aggregate):
        return aggregate(inputs[0], spec.fn, spec.attr, spec.by, spec.alias)
    if isinstance(spec, Pivot):
        return pivot(inputs[0], spec.attr, spec.over)
    if isinstance(spec, Merge):
        return merge(spec.kind, inputs[0], inputs[1], spec.on)
    if isinstance(spec, Union):
        return union(inputs[0], inputs[1])
    if isinstance(spec, Difference):
        return difference(inputs[0], inputs[1])
    raise ValueError(f"not a query spec: {spec!r}")


# ---------------------------------------------------------------------------
# JSON wire format (service + sidecars); mirrors the spec types one-to-one
# ---------------------------------------------------------------------------


def predicate_to_json(p) -> dict:
    if isinstance(p, Comparison):
        d = {"type": "cmp", "attr": p.attr, "cmp": p.op}
        if p.other_attr is not None:
            d["other"] = p.other_attr
        else:
            d["value"] = None if p.value is None else str(p.value)
            d["null"] = p.value is None
        return d
    if isinstance(p, Not):
        return {"type": "not", "child": predicate_to_json(p.child)}
    if isinstance(p, (And, Or)):
        return {"type": "and" if isinstance(p, And) else "or",
                "left": predicate_to_json(p.left), "right": predicate_to_json(p.right)}
    raise ValueError(f"not a predicate: {p!r}")


def predicate_from_json(d: dict):
    t = d["type"]
    if t == "cmp":
        if "other" in d:
            return Comparison(d["attr"], d["cmp"], other_attr=d["other"])
        value = None if d.get("null") else d.get("value")
        return Comparison(d["attr"], d["cmp"], value=value)
    if t == "not":
        return Not(predicate_from_json(d["child"]))
    if t in ("and", "or"):
        cls = And if t == "and" else Or
        return cls(predicate_from_json(d["left"]), predicate_from_json(d["right"]))
    raise ValueError(f"bad predicate json: {d!r}")


def expr_to_json(e) -> dict:
    if isinstance(e, Num):
        return {"type": "num", "value": str(e.value)}
    if isinstance(e, Ref):
        return {"type": "ref", "name": e.name}
    if isinstance(e, BinOp):
        return {"type": "bin", "op": e.op,
                "left": expr_to_json(e.left), "right": expr_to_json(e.right)}
    raise ValueError(f"not an expression: {e!r}")


def expr_from_json(d: dict):
    t = d["type"]
    if t == "num":
        return Num(Decimal(d["value"]))
    if t == "ref":
        return Ref(d["name"])
    if t == "bin":
        return BinOp(d["op"], expr_from_json(d["left"]), expr_from_json(d["right"]))
    raise ValueError(f"bad expression json: {d!r}")


def spec_to_json(spec) -> dict:
    if isinstance(spec, Filter):
        return {"op": "filter", "predicate": predicate_to_json(spec.predicate)}
    if isinstance(spec, Project):
        return {"op": "project", "attrs": list(spec.attrs),
                "calcs": [{"expr": expr_to_json(e), "as": name} for e, name in spec.calcs]}
    if isinstance(spec, Aggregate):
        d = {"op": "aggregate", "fn": spec.fn, "attr": spec.attr, "by": sorted(spec.by)}
        if spec.alias:
            d["as"] = spec.alias
        return d
    if isinstance(spec, Pivot):
        return {"op": "pivot", "attr": spec.attr, "over": sorted(spec.over)}
    if isinstance(spec, Merge):
        return {"op": "merge", "kind": spec.kind,
                "on": sorted(spec.on) if spec.on is not None else None}
    if isinstance(spec, Union):
        return {"op": "union"}
    if isinstance(spec, Difference):
        return {"op": "difference"}
    raise ValueError(f"not a query spec: {spec!r}")


def spec_from_json(d: dict):
    op = d.get("op")
    if op == "filter":
        return Filter(predicate_from_json(d["predicate"]))
    if op == "project":
        calcs = tuple((expr_from_json(c["expr"]), c["as"]) for c in d.get("calcs", []))
        return Project(tuple(d["attrs"]), calcs)
    if op == "aggregate":
        return Aggregate(d["fn"], d["attr"], tuple(d["by"]), d.get("as"))
    if op == "pivot":
        return Pivot(d["attr"], tuple(d["over"]))
    if op == "merge":
        on = d.get("on")
        return Merge(d["kind"], tuple(on) if on is not None else None)
    if op == "union":
        return Union()
    if op == "difference":
        return Difference()
    raise ValueError(f"bad query spec json: {d!r}")
