"""Aggregation functions: applicability by category, co-domains, evaluation,
and distributivity facts."""

from __future__ import annotations

from decimal import Decimal

from .errors import NotApplicable
from .model import DESC, NUM, STAT

SUM = "SUM"
AVG = "AVG"
COUNT = "COUNT"
COUNTDISTINCT = "COUNTDISTINCT"
MIN = "MIN"
MAX = "MAX"

AGG_FNS = (SUM, AVG, COUNT, COUNTDISTINCT, MIN, MAX)

_APPLICABLE = {
    NUM: (SUM, AVG, COUNT, COUNTDISTINCT, MIN, MAX),
    DESC: (COUNT, COUNTDISTINCT),
    STAT: (COUNT, COUNTDISTINCT, MIN, MAX),
}

# (fn, domain category) -> co-domain category
_CODOMAIN = {
    (SUM, NUM): NUM,
    (MIN, NUM): NUM,
    (MAX, NUM): NUM,
    (MIN, STAT): STAT,
    (MAX, STAT): STAT,
    (AVG, NUM): STAT,
}


def applicable_functions(category: str) -> tuple[str, ...]:
    try:
        return _APPLICABLE[category]
    except KeyError:
        raise NotApplicable(f"unknown category {category!r}")


def codomain_category(fn: str, category: str) -> str:
    if fn not in applicable_functions(category):
        raise NotApplicable(f"{fn} is not applicable to category {category}")
    if fn in (COUNT, COUNTDISTINCT):
        return NUM
    return _CODOMAIN[(fn, category)]


ALWAYS = "Always"
NEVER = "Never"
CONDITIONAL_COUNTDISTINCT = "ConditionalCountDistinct"

# f re-aggregated with g; AVG is treated as never distributive, its
# two-element special case being too data-dependent to rely on
_DISTRIBUTIVE = {
    (SUM, SUM): ALWAYS,
    (MIN, MIN): ALWAYS,
    (MAX, MAX): ALWAYS,
    (COUNT, SUM): ALWAYS,
    (COUNTDISTINCT, SUM): CONDITIONAL_COUNTDISTINCT,
}


def is_distributive(f: str, g: str) -> str:
    return _DISTRIBUTIVE.get((f, g), NEVER)


def distributive_using(f: str) -> tuple[str, ...]:
    """Functions g with f unconditionally distributive using g."""
    return tuple(g for (ff, g), kind in _DISTRIBUTIVE.items()
                 if ff == f and kind == ALWAYS)


DUPLICATE_INSENSITIVE = (COUNTDISTINCT, MIN, MAX)
# functions that skip null inputs; COUNT and COUNTDISTINCT treat the null
# marker as a regular value
NULL_SKIPPING = (SUM, AVG, MIN, MAX)


def apply_fn(fn: str, values) -> object:
    """Aggregate a sequence of values. SUM/AVG/MIN/MAX skip nulls and return
    null for all-null input; COUNT/COUNTDISTINCT count nulls as values."""
    values = list(values)
    if fn == COUNT:
        return Decimal(len(values))
    if fn == COUNTDISTINCT:
        return Decimal(len(set(values)))
    nonnull = [v for v in values if v is not None]
    if not nonnull:
        return None
    if fn == SUM:
        return sum(nonnull, Decimal(0))
    if fn == AVG:
        return sum(nonnull, Decimal(0)) / Decimal(len(nonnull))
    if fn == MIN:
        return min(nonnull)
    if fn == MAX:
        return max(nonnull)
    raise NotApplicable(f"unknown aggregation function {fn!r}")
