"""summar-guard: analytic tables with aggregability tracking.

Executes multidimensional queries (filter, project, aggregate, pivot, merge,
union, difference) while propagating per-attribute aggregable properties, so
interactive aggregations are either provably correct or rejected with an
explanation that points back to a usable ancestor table.
"""

from .engine import (
    Aggregate,
    And,
    BinOp,
    Comparison,
    Difference,
    Filter,
    Merge,
    Not,
    Num,
    Or,
    Pivot,
    Project,
    Ref,
    Union,
)
from .graph import AttributeGraph, closure, dimension_identifier, discover, highest
from .model import AnalyticTable, AttributeDef, Schema, literal_eq, lfd_holds, nfd_holds
from .properties import AggregableProperty, BASIC, GSUM, SUM_MODE, default_properties, propagate
from .session import Session, Verdict

__version__ = "0.1.0"

__all__ = [
    "Aggregate", "And", "AnalyticTable", "AggregableProperty", "AttributeDef",
    "AttributeGraph", "BASIC", "BinOp", "Comparison", "Difference", "Filter",
    "GSUM", "Merge", "Not", "Num", "Or", "Pivot", "Project", "Ref", "Schema",
    "Session", "SUM_MODE", "Union", "Verdict", "closure", "default_properties",
    "dimension_identifier", "discover", "highest", "lfd_holds", "literal_eq",
    "nfd_holds", "propagate",
]
