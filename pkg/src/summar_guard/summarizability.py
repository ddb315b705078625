"""Instance-level summarizability checks and the brute-force oracles that
certify the propagation rules in tests."""

from __future__ import annotations

from itertools import combinations
from typing import Iterable, Sequence

from . import engine
from .errors import ExplosionGuard
from .funcs import (
    ALWAYS,
    CONDITIONAL_COUNTDISTINCT,
    NEVER,
    is_distributive,
)
from .model import AnalyticTable, lfd_holds, render_value
from .properties import maximal_countdistinct_sets  # re-exported: same concern

__all__ = [
    "is_distributive",
    "ALWAYS",
    "NEVER",
    "CONDITIONAL_COUNTDISTINCT",
    "countdistinct_condition",
    "maximal_countdistinct_sets",
    "oracle_summarizable",
    "oracle_g_summarizable",
    "partition_report",
    "EQUAL",
    "LEFT_SUBSET",
    "DISJOINT",
    "OTHER",
]

MAX_ORACLE_DIMS = 6


def _guard(table: AnalyticTable) -> None:
    if len(table.schema.dimension_names) > MAX_ORACLE_DIMS:
        raise ExplosionGuard(
            f"oracle limited to {MAX_ORACLE_DIMS} dimension attributes"
        )


def countdistinct_condition(table: AnalyticTable, attr: str,
                            z1: Iterable[str], z2: Iterable[str]) -> bool:
    """Sufficient condition for COUNTDISTINCT-then-SUM correctness:
    Z2 ∪ {attr} literally determines Z1."""
    z1 = list(z1)
    z2 = list(z2)
    return lfd_holds(table, [*z2, attr], z1)


def _agg_map(table: AnalyticTable, fn: str, attr: str, by: Sequence[str]) -> dict:
    """Aggregate and key the result by the caller's attribute order so maps
    from differently-ordered schemas compare directly."""
    agg = engine.aggregate(table, fn, attr, by, alias="__v")
    vi = agg.schema.index("__v")
    out = {}
    for row in agg.rows:
        out[agg.project_values(by, row)] = row[vi]
    return out


def oracle_summarizable(table: AnalyticTable, attr: str, f: str, g: str,
                        z1: Sequence[str], z2: Sequence[str]) -> bool:
    """Materializes both routes of the summarizability equation and compares
    them as sets under literal equality: aggregating the aggregate with g
    must equal aggregating the input directly."""
    _guard(table)
    z1 = table.schema.in_schema_order(z1)
    z2 = table.schema.in_schema_order(z2)
    r = engine.aggregate(table, f, attr, z1)
    two_step = _agg_map(r, g, f"{f}({attr})", z2)
    one_step = _agg_map(table, f, attr, z2)
    return two_step == one_step


def shared_dimension_attributes(table: AnalyticTable, result: AnalyticTable) -> list[str]:
    rdims = set(result.schema.dimension_names)
    return [a for a in table.schema.dimension_names if a in rdims]


def oracle_g_summarizable(table: AnalyticTable, query, attr: str, fn: str,
                          z: Iterable[str], inputs: Sequence[AnalyticTable] | None = None,
                          ) -> bool:
    """G-summarizability by enumeration: for every grouping Z' between Z and
    the shared dimension attributes, matching groups of the input and of the
    query result must carry literally equal aggregates.

    ``query`` is either a QuerySpec (executed against ``inputs``, defaulting
    to ``[table]``) or an already-materialized result table.
    """
    if isinstance(query, AnalyticTable):
        result = query
    else:
        result = engine.run_spec(query, list(inputs) if inputs else [table])
    if not (table.schema.has(attr) and result.schema.has(attr)):
        raise ExplosionGuard(f"attribute {attr!r} must exist on both sides")
    _guard(table)
    shared = shared_dimension_attributes(table, result)
    z = set(z)
    if not z <= set(shared):
        z &= set(shared)
    rest = [a for a in shared if a not in z]
    for k in range(len(rest) + 1):
        for extra in combinations(rest, k):
            zp = table.schema.in_schema_order(z | set(extra))
            left = _agg_map(table, fn, attr, zp)
            right = _agg_map(result, fn, attr, zp)
            for key, val in left.items():
                if key in right and right[key] != val:
                    return False
    return True


EQUAL = "Equal"
LEFT_SUBSET = "LeftSubset"
DISJOINT = "Disjoint"
OTHER = "Other"


def partition_report(table: AnalyticTable, other: AnalyticTable,
                     y: Sequence[str], pivot: Sequence[str]) -> list[dict]:
    """For each non-empty partition of ``other`` by ``pivot``, how the
    table-side projection on ``y`` relates to the other side's. Feeds the
    merge/set propagation conditions and explanation witnesses."""
    y = list(y)
    pivot = list(pivot)
    order: list[tuple] = []
    right: dict[tuple, set] = {}
    for row in other.rows:
        key = other.project_values(pivot, row)
        if key not in right:
            right[key] = set()
            order.append(key)
        right[key].add(other.project_values(y, row))
    left: dict[tuple, set] = {}
    for row in table.rows:
        key = table.project_values(pivot, row)
        left.setdefault(key, set()).add(table.project_values(y, row))

    report = []
    for key in order:
        lproj = left.get(key, set())
        rproj = right[key]
        if lproj == rproj:
            rel = EQUAL
        elif lproj and lproj < rproj:
            rel = LEFT_SUBSET
        elif not (lproj & rproj):
            rel = DISJOINT
        else:
            rel = OTHER
        report.append({
            "partition": tuple(render_value(v) for v in key),
            "left": lproj,
            "right": rproj,
            "relation": rel,
        })
    return report
