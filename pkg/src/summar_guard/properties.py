"""Aggregable properties: defaults, and their propagation through queries.

A property ``P_A(F, X)`` says attribute A of a table may be aggregated with
function F along any subset of X; a valid aggregate must group by everything
else. Three propagation modes exist:

* ``basic``  — metadata bookkeeping only,
* ``sum``    — the aggregate rule additionally guarantees that re-aggregating
  the new measure reproduces what the same aggregation would compute on the
  input (summarizability),
* ``gsum``   — every rule shrinks X so that matching groups of input and
  result agree under any finer grouping (G-summarizability).

Rules in ``gsum`` mode run instance-level partition checks on the inputs;
their outcomes are recorded on the emitted property as a human-readable note.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from . import engine, funcs
from .engine import (
    Aggregate,
    Difference,
    Filter,
    FULL,
    LEFT,
    Merge,
    Pivot,
    Project,
    RIGHT,
    Union,
)
from .errors import InvalidDeterminant, MissingInputProperty
from .funcs import applicable_functions, codomain_category
from .graph import closure, fact_identifier, highest
from .model import AnalyticTable, DIMENSION, MEASURE, NUM, lfd_holds, render_value

BASIC = "basic"
SUM_MODE = "sum"
GSUM = "gsum"
MODES = (BASIC, SUM_MODE, GSUM)

MINIMIZE_XD = "MinimizeXd"
COMPLETE_XF = "CompleteXf"
RECOMPUTE_XD = "RecomputeXd"


@dataclass(frozen=True)
class AggregableProperty:
    attribute: str
    fn: str
    x: frozenset[str]
    x_d: frozenset[str] | None  # None for dimension attributes
    x_f: frozenset[str] = frozenset()
    pending: tuple[str, ...] = ()
    provenance: str = "Declared"
    note: str | None = None

    def to_json(self) -> dict:
        return {
            "attribute": self.attribute,
            "fn": self.fn,
            "x": sorted(self.x),
            "x_d": sorted(self.x_d) if self.x_d is not None else None,
            "x_f": sorted(self.x_f),
            "pending": list(self.pending),
            "provenance": self.provenance,
            **({"note": self.note} if self.note else {}),
        }

    @classmethod
    def from_json(cls, d: dict) -> "AggregableProperty":
        return cls(
            attribute=d["attribute"],
            fn=d["fn"],
            x=frozenset(d["x"]),
            x_d=frozenset(d["x_d"]) if d.get("x_d") is not None else None,
            x_f=frozenset(d.get("x_f", ())),
            pending=tuple(d.get("pending", ())),
            provenance=d.get("provenance", "Declared"),
            note=d.get("note"),
        )


def properties_for(table: AnalyticTable, attr: str, fn: str | None = None):
    out = [p for p in table.properties if p.attribute == attr]
    if fn is not None:
        out = [p for p in out if p.fn == fn]
    return out


def required_grouping(table: AnalyticTable, prop: AggregableProperty) -> set[str]:
    """Dimension attributes that must appear in the group-by: S_D - X - {A}."""
    dims = set(table.schema.dimension_names)
    return dims - set(prop.x) - {prop.attribute}


def allowing_property(table: AnalyticTable, fn: str, attr: str,
                      by: Iterable[str]) -> AggregableProperty | None:
    """The first property that makes aggregate(fn, attr, by) valid, if any."""
    by = set(by)
    for p in properties_for(table, attr, fn):
        if required_grouping(table, p) <= by:
            return p
    return None


def closure_in(table: AnalyticTable, x: Iterable[str]) -> frozenset[str]:
    return frozenset(closure(table.graphs.values(), x,
                             present=table.schema.dimension_names))


def fact_id(table: AnalyticTable) -> frozenset[str]:
    return frozenset(fact_identifier(table.schema, table.graphs))


def default_properties(
    table: AnalyticTable,
    overrides: Mapping[str, Mapping[str, Iterable[str]]] | None = None,
) -> list[AggregableProperty]:
    """Default rules: measures depend on the fact identifier with nothing
    forbidden; dimension attributes count along everything but themselves.
    ``overrides`` supplies per-attribute ``x_d``/``x_f``; an overridden
    determinant must literally determine the attribute."""
    overrides = overrides or {}
    dims = set(table.schema.dimension_names)
    out: list[AggregableProperty] = []
    for a in table.schema.attributes:
        ov = overrides.get(a.name, {})
        xf = frozenset(ov.get("x_f", ()))
        if a.role == MEASURE:
            declared = "x_d" in ov
            if declared:
                xd = frozenset(ov["x_d"])
                if not lfd_holds(table, xd, [a.name]):
                    raise InvalidDeterminant(
                        f"{sorted(xd)} does not literally determine {a.name!r}"
                    )
            else:
                xd = fact_id(table)
            x = closure_in(table, xd) - xf
            pending = tuple(
                p for p, used in ((MINIMIZE_XD, not declared),
                                  (COMPLETE_XF, "x_f" not in ov)) if used
            )
            provenance = "Declared" if (declared or "x_f" in ov) else "Defaulted"
            for fn in applicable_functions(a.category):
                out.append(AggregableProperty(a.name, fn, x, xd, xf, pending, provenance))
        else:
            x = frozenset(dims - {a.name} - xf)
            pending = () if "x_f" in ov else (COMPLETE_XF,)
            provenance = "Declared" if "x_f" in ov else "Defaulted"
            for fn in applicable_functions(a.category):
                out.append(AggregableProperty(a.name, fn, x, None, xf, pending, provenance))
    return out


def maximal_countdistinct_sets(
    table: AnalyticTable, x: Iterable[str], y: Sequence[str], attr: str
) -> list[frozenset[str]]:
    """All maximal X' ⊆ X∩Y with (Y-X') ∪ {attr} ↦ Y.

    Candidate minimal K = Y-X' sets come from graph closures and are
    instance-verified on the table before use.
    """
    x = set(x)
    y = list(y)
    yset = set(y)
    graphs = list(table.graphs.values())
    minimal_ks: list[frozenset[str]] = []
    for size in range(0, len(y) + 1):
        for combo in combinations(y, size):
            k = frozenset(combo)
            if any(prev <= k for prev in minimal_ks):
                continue
            if yset <= closure(graphs, k | {attr}) and lfd_holds(table, k | {attr}, y):
                minimal_ks.append(k)
    sets = []
    for k in minimal_ks:
        cand = frozenset((yset & x) - k)
        if not any(cand < other or cand == other for other in sets):
            sets.append(cand)
    # drop non-maximal candidates that slipped in before a superset was found
    return [s for s in sets if not any(s < t for t in sets)]


# ---------------------------------------------------------------------------
# propagation
# ---------------------------------------------------------------------------


def propagate(spec, inputs: Sequence[AnalyticTable], result: AnalyticTable,
              mode: str) -> list[AggregableProperty]:
    if mode not in MODES:
        raise ValueError(f"unknown propagation mode {mode!r}")
    if isinstance(spec, Filter):
        return _filter_props(spec, inputs[0], result, mode)
    if isinstance(spec, Project):
        return _project_props(spec, inputs[0], result, mode)
    if isinstance(spec, Aggregate):
        return _aggregate_props(spec, inputs[0], result, mode)
    if isinstance(spec, Pivot):
        return _pivot_props(spec, inputs[0], result, mode)
    if isinstance(spec, Merge):
        return _merge_props(spec, inputs[0], inputs[1], result, mode)
    if isinstance(spec, (Union, Difference)):
        return _set_props(spec, inputs[0], inputs[1], result, mode)
    raise ValueError(f"not a query spec: {spec!r}")


def _filter_props(spec, t, r, mode):
    pred_attrs = sorted(spec.predicate.attributes())
    touches_measure = any(t.schema.attribute(a).role == MEASURE for a in pred_attrs)
    out = []
    if mode in (BASIC, SUM_MODE):
        for p in t.properties:
            out.append(replace(p, provenance="Propagated(t6.filter)"))
        return out

    if touches_measure:
        # a dimension grouping that isolates the filter's effect is not
        # derivable from a measure predicate; only a whole-partition filter
        # keeps matching groups intact
        dims = list(t.schema.dimension_names)
        verdicts: dict[tuple, bool] = {}
        clean = True
        for row in t.rows:
            key = t.project_values(dims, row)
            v = engine.eval_predicate(spec.predicate, t, row)
            if verdicts.setdefault(key, v) != v:
                clean = False
                break
        if not clean:
            return []
        for p in t.properties:
            out.append(AggregableProperty(
                p.attribute, p.fn, frozenset(), p.x_d, p.x_f,
                pending=_merge_pending(p.pending, (COMPLETE_XF,)),
                provenance="Propagated(t9.filter.measure-pred)",
                note="measure predicate keeps or drops whole partitions of "
                     + ",".join(dims)))
        return out

    y = set(pred_attrs)
    fid = fact_id(r)
    for p in t.properties:
        is_measure = p.x_d is not None
        out.append(AggregableProperty(
            p.attribute, p.fn, frozenset(p.x - y),
            fid if is_measure else None, frozenset(p.x_f - y),
            pending=_merge_pending(p.pending, (MINIMIZE_XD,) if is_measure else ()),
            provenance="Propagated(t9.filter)"))
    return out


def _project_props(spec, t, r, mode):
    kept = set(spec.attrs)
    out = []
    rule = "t6.project" if mode in (BASIC, SUM_MODE) else "t9.project"
    for p in t.properties:
        if p.attribute in kept:
            out.append(replace(p, provenance=f"Propagated({rule})"))
    for expr, name in spec.calcs:
        xd = set()
        for a in expr.attributes():
            if t.schema.attribute(a).role == DIMENSION:
                xd.add(a)
            else:
                src = properties_for(t, a)
                if src and src[0].x_d is not None:
                    xd |= set(src[0].x_d)
                else:
                    xd |= set(fact_id(t))
        xd = frozenset(xd)
        x = closure_in(r, xd)
        for fn in applicable_functions(NUM):
            out.append(AggregableProperty(
                name, fn, x, xd, frozenset(),
                pending=(MINIMIZE_XD, COMPLETE_XF),
                provenance="Propagated(t6.project.calc)"))
    return out


def _aggregate_props(spec, t, r, mode):
    y = list(r.schema.dimension_names)  # spec.by in schema order
    yset = set(y)
    out = []

    dim_rule = "t6.aggregate.dim" if mode in (BASIC, SUM_MODE) else "t9.aggregate.dim"
    for p in t.properties:
        if p.attribute not in yset:
            continue
        if mode == GSUM and p.fn not in funcs.DUPLICATE_INSENSITIVE:
            continue
        out.append(AggregableProperty(
            p.attribute, p.fn, frozenset(p.x & yset), None, frozenset(p.x_f & yset),
            pending=p.pending, provenance=f"Propagated({dim_rule})"))

    name = spec.result_name
    srcs = properties_for(t, spec.attr, spec.fn)
    if not srcs:
        raise MissingInputProperty(
            f"no aggregable property for {spec.fn}({spec.attr}) on the input"
        )
    src = srcs[0]
    out_cat = codomain_category(spec.fn, t.schema.attribute(spec.attr).category)
    fid = fact_id(r)

    if mode == BASIC:
        for g in applicable_functions(out_cat):
            out.append(AggregableProperty(
                name, g, frozenset(yset), fid, frozenset(),
                pending=(MINIMIZE_XD, COMPLETE_XF),
                provenance="Propagated(t6.aggregate.measure)"))
        return out

    # summarizability-preserving rule (also used for the new measure in gsum)
    for g in applicable_functions(out_cat):
        if funcs.is_distributive(spec.fn, g) == funcs.ALWAYS:
            out.append(AggregableProperty(
                name, g, frozenset(src.x & yset), fid, frozenset(),
                pending=(MINIMIZE_XD, COMPLETE_XF),
                provenance="Propagated(t8.aggregate.distributive)"))
    if spec.fn == funcs.COUNTDISTINCT:
        for xi in maximal_countdistinct_sets(t, src.x, y, spec.attr):
            k = sorted(yset - xi)
            out.append(AggregableProperty(
                name, funcs.SUM, xi, fid, frozenset(),
                pending=(MINIMIZE_XD, COMPLETE_XF),
                provenance="Propagated(t8.aggregate.countdistinct)",
                note=f"minimal K={{{', '.join(k)}}} with K ∪ {{{spec.attr}}} ↦ group-by"))
    return out


def _pivot_props(spec, t, r, mode):
    y = set(spec.over)
    out = []
    fid = None
    residual_rule_fns = funcs.DUPLICATE_INSENSITIVE if mode == GSUM else funcs.AGG_FNS
    rule = "t6.pivot" if mode in (BASIC, SUM_MODE) else "t9.pivot"
    for p in t.properties:
        if not r.schema.has(p.attribute):
            continue
        if p.fn not in residual_rule_fns:
            continue
        xd = p.x_d or frozenset()
        if not (xd & y):
            out.append(AggregableProperty(
                p.attribute, p.fn, frozenset(p.x - y), p.x_d, frozenset(p.x_f - y),
                pending=p.pending, provenance=f"Propagated({rule})"))
        else:
            fid = fid if fid is not None else fact_id(r)
            out.append(AggregableProperty(
                p.attribute, p.fn, closure_in(r, fid) - frozenset(p.x_f - y),
                fid, frozenset(p.x_f - y),
                pending=_merge_pending(p.pending, (MINIMIZE_XD,)),
                provenance=f"Propagated({rule})"))

    pivot_cols = [a for a in r.schema.names if a not in t.schema.names]
    for p in properties_for(t, spec.attr):
        xd = p.x_d or frozenset()
        for col in pivot_cols:
            if not (xd <= y):
                out.append(AggregableProperty(
                    col, p.fn, frozenset(p.x - y), frozenset(xd - y),
                    frozenset(p.x_f - y), pending=p.pending,
                    provenance="Propagated(t6.pivot.values)"))
            else:
                fid = fid if fid is not None else fact_id(r)
                out.append(AggregableProperty(
                    col, p.fn, closure_in(r, fid) - frozenset(p.x_f - y),
                    fid, frozenset(p.x_f - y),
                    pending=_merge_pending(p.pending, (MINIMIZE_XD,)),
                    provenance="Propagated(t6.pivot.values)"))
    return out


def _merge_pending(old: tuple, extra: tuple) -> tuple:
    return tuple(dict.fromkeys((*old, *extra)))


def _partition_tuples(table, pivot_attrs, proj_attrs):
    """pivot-tuple -> set of projected tuples, in first-appearance order."""
    order: list[tuple] = []
    parts: dict[tuple, set] = {}
    for row in table.rows:
        key = table.project_values(pivot_attrs, row)
        if key not in parts:
            parts[key] = set()
            order.append(key)
        parts[key].add(table.project_values(proj_attrs, row))
    return order, parts


def _subset_condition(home, other, y, ytop, require_equal=False):
    """Table 10 instance conditions: per non-empty Ytop-partition of the
    preserved table, the home-side Y-projection is empty, equal, or a subset.
    Returns (holds, witness-note)."""
    _, other_parts = _partition_tuples(other, ytop, y)
    _, home_parts = _partition_tuples(home, ytop, y)
    for key, other_proj in other_parts.items():
        home_proj = home_parts.get(key, set())
        if not home_proj:
            continue
        ok = home_proj == other_proj if require_equal else home_proj <= other_proj
        if not ok:
            rel = "different from" if require_equal else "not a subset of"
            pretty = ", ".join(render_value(v) for v in key)
            return False, f"partition ({pretty}): home projection {rel} preserved side"
    return True, None


def _merge_props(spec, left, right, r, mode):
    y = list(spec.on) if spec.on is not None else engine.common_dimension_attributes(left, right)
    shared = engine._merged_dimension_output(left, right, y)
    overlap = set(left.schema.names) & set(right.schema.names)
    if shared:
        ren_l: dict[str, str] = {}
        ren_r = {n: f"{n}@right" for n in overlap - set(y)}
    else:
        ren_l = {n: f"{n}@left" for n in overlap}
        ren_r = {n: f"{n}@right" for n in overlap}

    out = []
    if spec.kind in (LEFT, RIGHT):
        preserved, padded = (left, right) if spec.kind == LEFT else (right, left)
        pres_ren, pad_ren = (ren_l, ren_r) if spec.kind == LEFT else (ren_r, ren_l)
        out += _merge_side_props(preserved, padded, y, r, mode, pres_ren, pad_ren,
                                 rules="left", include_join_attrs=True)
        out += _merge_side_props(padded, preserved, y, r, mode, pad_ren, pres_ren,
                                 rules="outer", include_join_attrs=not shared)
    elif spec.kind == FULL:
        out += _merge_side_props(left, right, y, r, mode, ren_l, ren_r,
                                 rules="outer", include_join_attrs=True)
        out += _merge_side_props(right, left, y, r, mode, ren_r, ren_l,
                                 rules="outer", include_join_attrs=not shared)
    else:
        out += _merge_side_props(left, right, y, r, mode, ren_l, ren_r,
                                 rules="strict", include_join_attrs=True)
        out += _merge_side_props(right, left, y, r, mode, ren_r, ren_l,
                                 rules="strict", include_join_attrs=not shared)
    return out


def _merge_side_props(home, other, y, r, mode, ren_home, ren_other,
                      rules, include_join_attrs):
    """Propagate properties of one merge input. ``rules`` picks the rule set:
    "left" when every home row survives unduplicated-or-flagged, "outer" when
    home rows can be dropped or null-padded (the right/full case of the home
    side), "strict" for inner joins."""
    yset = set(y)
    home_dims = set(home.schema.dimension_names)
    other_new_dims = {ren_other.get(a, a) for a in other.schema.dimension_names
                      if a not in yset}
    r_dims = set(r.schema.dimension_names)

    y_maps = lfd_holds(other, y, other.schema.names)
    gate_fns = funcs.AGG_FNS if y_maps else funcs.DUPLICATE_INSENSITIVE
    gate_note = None if y_maps else \
        "join attributes do not determine the other side: duplicate-sensitive functions dropped"

    ytop = highest(home.schema, yset & home_dims)
    cond_eq = cond_sub = None  # computed lazily, with witness notes

    def rename(names):
        return frozenset(ren_home.get(n, n) for n in names)

    out = []
    for p in home.properties:
        a_out = ren_home.get(p.attribute, p.attribute)
        if not r.schema.has(a_out):
            continue
        if p.attribute in yset and not include_join_attrs:
            continue
        is_measure = p.x_d is not None
        x = rename(p.x)
        xf = rename(p.x_f)
        xd = rename(p.x_d) if p.x_d is not None else None
        base = (x | (other_new_dims - xf)) & r_dims

        if mode in (BASIC, SUM_MODE):
            if is_measure:
                x_new = (closure_in(r, xd) - xf) & r_dims
                out.append(AggregableProperty(
                    a_out, p.fn, frozenset(x_new), xd, xf,
                    pending=_merge_pending(p.pending, (COMPLETE_XF,)),
                    provenance="Propagated(t7.merge.measure)"))
            else:
                out.append(AggregableProperty(
                    a_out, p.fn, frozenset(base - {a_out}), None, xf,
                    pending=_merge_pending(p.pending, (COMPLETE_XF,)),
                    provenance="Propagated(t7.merge.dim)"))
            continue

        # gsum rules
        if p.fn not in gate_fns:
            continue
        if rules == "left":
            if is_measure:
                out.append(AggregableProperty(
                    a_out, p.fn, frozenset(x & r_dims), xd, xf,
                    pending=_merge_pending(p.pending, (COMPLETE_XF,)),
                    provenance="Propagated(t10.left.measure)", note=gate_note))
            else:
                out.append(AggregableProperty(
                    a_out, p.fn, frozenset(base - {a_out}), None, xf,
                    pending=_merge_pending(p.pending, (COMPLETE_XF,)),
                    provenance="Propagated(t10.left.dim)", note=gate_note))
            continue

        rule_tag = "t10.outer" if rules == "outer" else "t10.strict"
        ytop_out = rename(ytop)
        if p.attribute in yset and rules == "outer":
            if cond_eq is None:
                cond_eq = _subset_condition(home, other, y, ytop, require_equal=True)
            holds, witness = cond_eq
            drop = ytop_out if holds else rename(yset)
            out.append(AggregableProperty(
                a_out, p.fn, frozenset((base - drop) - {a_out}), None, xf,
                pending=_merge_pending(p.pending, (COMPLETE_XF,)),
                provenance=f"Propagated({rule_tag}.join-dim)",
                note=witness or gate_note))
            continue

        if cond_sub is None:
            cond_sub = _subset_condition(home, other, y, ytop)
        holds, witness = cond_sub
        if is_measure:
            if holds:
                # padded rows carry nulls for this measure: only null-skipping
                # functions survive; duplication additionally needs the gate
                fns_ok = set(funcs.NULL_SKIPPING if rules == "outer" else funcs.AGG_FNS) \
                    & set(gate_fns)
                if p.fn not in fns_ok:
                    continue
                out.append(AggregableProperty(
                    a_out, p.fn, frozenset((x - ytop_out) & r_dims), xd, xf,
                    pending=_merge_pending(p.pending, (COMPLETE_XF,)),
                    provenance=f"Propagated({rule_tag}.measure)", note=gate_note))
            else:
                out.append(AggregableProperty(
                    a_out, p.fn, frozenset((x - rename(yset)) & r_dims), xd, xf,
                    pending=_merge_pending(p.pending, (RECOMPUTE_XD,)),
                    provenance=f"Propagated({rule_tag}.measure)", note=witness))
        else:
            if holds:
                if rules == "outer" and p.fn not in funcs.DUPLICATE_INSENSITIVE:
                    continue  # drops and padded nulls make counts diverge
                x_new = base if rules == "outer" else base - ytop_out
                out.append(AggregableProperty(
                    a_out, p.fn, frozenset(x_new - {a_out}), None, xf,
                    pending=_merge_pending(p.pending, (COMPLETE_XF,)),
                    provenance=f"Propagated({rule_tag}.dim)", note=gate_note))
            else:
                out.append(AggregableProperty(
                    a_out, p.fn, frozenset((base - rename(yset)) - {a_out}), None, xf,
                    pending=_merge_pending(p.pending, (COMPLETE_XF,)),
                    provenance=f"Propagated({rule_tag}.dim)", note=witness))
    return out


def _paired_property(other: AnalyticTable, p: AggregableProperty):
    for q in properties_for(other, p.attribute, p.fn):
        return q
    return None


def _set_props(spec, a, b, r, mode):
    is_union = isinstance(spec, Union)
    out = []
    dims = set(r.schema.dimension_names)
    ytop = frozenset(highest(r.schema, dims))

    if mode == GSUM:
        if is_union:
            cond = not (a.distinct_tuples(sorted(ytop)) & b.distinct_tuples(sorted(ytop)))
            note = None if cond else "highest-attribute partitions overlap"
        else:
            _, pa = _partition_tuples(a, sorted(ytop), a.schema.names)
            _, pb = _partition_tuples(b, sorted(ytop), b.schema.names)
            cond = all(pa.get(k) == pb.get(k) or not (pa.get(k, set()) & pb.get(k, set()))
                       for k in set(pa) | set(pb))
            note = None if cond else "a partition is neither equal nor disjoint"
        if not cond:
            return []

    for p in a.properties:
        q = _paired_property(b, p)
        if q is None:
            continue
        x = frozenset(p.x & q.x)
        xf = frozenset(p.x_f | q.x_f)
        pending = _merge_pending(p.pending, q.pending)
        if mode in (BASIC, SUM_MODE):
            if p.x_d is None:
                out.append(AggregableProperty(
                    p.attribute, p.fn, x, None, xf, pending,
                    f"Propagated(t7.{'union' if is_union else 'difference'}.dim)"))
            elif not is_union:
                out.append(AggregableProperty(
                    p.attribute, p.fn, frozenset(closure_in(r, p.x_d) - xf), p.x_d,
                    xf, pending, "Propagated(t7.difference.measure)"))
            elif lfd_holds(r, p.x_d, [p.attribute]):
                out.append(AggregableProperty(
                    p.attribute, p.fn, x, p.x_d, xf, pending,
                    "Propagated(t7.union.measure)"))
            else:
                fid = fact_id(r)
                out.append(AggregableProperty(
                    p.attribute, p.fn, frozenset(closure_in(r, fid) - xf), fid, xf,
                    _merge_pending(pending, (MINIMIZE_XD,)),
                    "Propagated(t7.union.measure)",
                    note="determinant no longer unique after union"))
        else:
            rule = "t11.union" if is_union else "t11.difference"
            if p.x_d is None:
                out.append(AggregableProperty(
                    p.attribute, p.fn, frozenset(x - ytop), None, xf,
                    pending, f"Propagated({rule}.dim)"))
            else:
                keeps_lfd = lfd_holds(r, p.x_d, [p.attribute])
                out.append(AggregableProperty(
                    p.attribute, p.fn, frozenset(x - ytop), p.x_d, xf,
                    _merge_pending(pending,
                                   (RECOMPUTE_XD,) if keeps_lfd else (MINIMIZE_XD,)),
                    f"Propagated({rule}.measure)"))
    return out
