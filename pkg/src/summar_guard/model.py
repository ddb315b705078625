"""Tables, schemas and the null-aware dependency checks everything else builds on.

Values are plain Python objects: ``None`` is the null marker, text is ``str``
and numbers are ``decimal.Decimal`` so that grouping and summing reproduce
printed fixtures without float drift.
"""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from typing import Iterable, Mapping, Sequence

from .errors import (
    DuplicateTuple,
    InvalidHierarchy,
    SchemaMismatch,
    UnknownAttribute,
)

logger = logging.getLogger(__name__)

NULL_TOKEN = "-"

NUM = "NUM"
DESC = "DESC"
STAT = "STAT"
CATEGORIES = (NUM, DESC, STAT)

DIMENSION = "dimension"
MEASURE = "measure"


def literal_eq(a, b) -> bool:
    """Null-as-value equality: two null markers are literally equal."""
    if a is None or b is None:
        return a is None and b is None
    return a == b


def tuple_literal_eq(t1: Sequence, t2: Sequence) -> bool:
    return len(t1) == len(t2) and all(literal_eq(a, b) for a, b in zip(t1, t2))


def parse_value(token: str | None, category: str):
    """Parse one CSV/DSL token according to the attribute category.

    ``-`` and the empty string are null. NUM/STAT parse to exact decimals,
    DESC keeps the raw text.
    """
    if token is None:
        return None
    token = token.strip()
    if token == "" or token == NULL_TOKEN:
        return None
    if category in (NUM, STAT):
        try:
            return Decimal(token)
        except InvalidOperation as exc:
            raise ValueError(f"not a number: {token!r}") from exc
    return token


def render_value(value) -> str:
    if value is None:
        return NULL_TOKEN
    if isinstance(value, Decimal):
        return format(value, "f")
    return str(value)


@dataclass(frozen=True)
class AttributeDef:
    name: str
    role: str  # DIMENSION | MEASURE
    category: str = DESC
    nullable: bool = False
    dimension: str | None = None  # dimension name for DIMENSION attributes

    def __post_init__(self):
        if self.role not in (DIMENSION, MEASURE):
            raise ValueError(f"bad role {self.role!r}")
        if self.category not in CATEGORIES:
            raise ValueError(f"bad category {self.category!r}")


@dataclass(frozen=True)
class DimensionBinding:
    """One dimension's footprint in a table: which attributes it contributes
    and the ancestor pairs (child, ancestor) among them, taken from the full
    hierarchy so that State < Country survives even when City is projected out."""

    name: str
    attributes: tuple[str, ...]
    ancestor_pairs: frozenset[tuple[str, str]] = frozenset()

    def restricted(self, keep: Iterable[str], rename: Mapping[str, str] | None = None) -> "DimensionBinding":
        keep = set(keep)
        rename = rename or {}
        attrs = tuple(rename.get(a, a) for a in self.attributes if a in keep)
        pairs = frozenset(
            (rename.get(a, a), rename.get(b, b))
            for a, b in self.ancestor_pairs
            if a in keep and b in keep
        )
        return DimensionBinding(self.name, attrs, pairs)


@dataclass(frozen=True)
class Schema:
    attributes: tuple[AttributeDef, ...]
    dimensions: tuple[DimensionBinding, ...] = ()

    def __post_init__(self):
        names = [a.name for a in self.attributes]
        if len(set(names)) != len(names):
            raise SchemaMismatch(f"duplicate attribute names in schema: {names}")

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.attributes)

    @property
    def dimension_names(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.attributes if a.role == DIMENSION)

    @property
    def measure_names(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.attributes if a.role == MEASURE)

    def attribute(self, name: str) -> AttributeDef:
        for a in self.attributes:
            if a.name == name:
                return a
        raise UnknownAttribute(name, self.names)

    def has(self, name: str) -> bool:
        return any(a.name == name for a in self.attributes)

    def index(self, name: str) -> int:
        for i, a in enumerate(self.attributes):
            if a.name == name:
                return i
        raise UnknownAttribute(name, self.names)

    def check_attrs(self, names: Iterable[str]) -> None:
        for n in names:
            self.attribute(n)

    def dimensions_of(self, attr: str) -> tuple[str, ...]:
        return tuple(b.name for b in self.dimensions if attr in b.attributes)

    def binding(self, dim_name: str) -> DimensionBinding:
        for b in self.dimensions:
            if b.name == dim_name:
                return b
        raise SchemaMismatch(f"no dimension {dim_name!r} in schema")

    def in_schema_order(self, names: Iterable[str]) -> list[str]:
        wanted = set(names)
        return [n for n in self.names if n in wanted]


DIMENSION_TABLE = "DimensionTable"
FACT_TABLE = "FactTable"


@dataclass(frozen=True)
class AnalyticTable:
    """Immutable rows + schema. ``properties`` and ``graphs`` are the attached
    aggregability metadata; query operators carry them forward untouched and
    the propagation layer replaces them on each result."""

    schema: Schema
    rows: tuple[tuple, ...]
    kind: str = FACT_TABLE
    name: str = ""
    properties: tuple = ()
    graphs: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        arity = len(self.schema.attributes)
        for r in self.rows:
            if len(r) != arity:
                raise SchemaMismatch(
                    f"row arity {len(r)} does not match schema arity {arity}: {r}"
                )

    def __len__(self):
        return len(self.rows)

    def column(self, name: str) -> list:
        i = self.schema.index(name)
        return [r[i] for r in self.rows]

    def project_values(self, names: Sequence[str], row: Sequence) -> tuple:
        idx = [self.schema.index(n) for n in names]
        return tuple(row[i] for i in idx)

    def distinct_tuples(self, names: Sequence[str]) -> set[tuple]:
        idx = [self.schema.index(n) for n in names]
        return {tuple(r[i] for i in idx) for r in self.rows}

    def with_metadata(self, properties=None, graphs=None) -> "AnalyticTable":
        return AnalyticTable(
            schema=self.schema,
            rows=self.rows,
            kind=self.kind,
            name=self.name,
            properties=tuple(properties) if properties is not None else self.properties,
            graphs=dict(graphs) if graphs is not None else self.graphs,
        )

    def renamed(self, name: str) -> "AnalyticTable":
        return AnalyticTable(self.schema, self.rows, self.kind, name,
                             self.properties, self.graphs)


def check_no_duplicates(rows: Sequence[tuple], context: str = "fact table") -> None:
    seen = set()
    for r in rows:
        if r in seen:
            raise DuplicateTuple(f"{context} contains duplicate tuple {r}")
        seen.add(r)


def lfd_holds(table: AnalyticTable, x: Iterable[str], y: Iterable[str]) -> bool:
    """Literal functional dependency X ↦ Y: literally-equal X implies
    literally-equal Y. Nulls group together."""
    x = list(x)
    y = list(y)
    table.schema.check_attrs(x)
    table.schema.check_attrs(y)
    xi = [table.schema.index(n) for n in x]
    yi = [table.schema.index(n) for n in y]
    seen: dict[tuple, tuple] = {}
    for r in table.rows:
        key = tuple(r[i] for i in xi)
        val = tuple(r[i] for i in yi)
        prev = seen.setdefault(key, val)
        if prev != val:
            return False
    return True


def nfd_holds(table: AnalyticTable, x: Iterable[str], y: Iterable[str]) -> bool:
    """Functional dependency restricted to rows whose X values are all non-null."""
    x = list(x)
    y = list(y)
    table.schema.check_attrs(x)
    table.schema.check_attrs(y)
    xi = [table.schema.index(n) for n in x]
    yi = [table.schema.index(n) for n in y]
    seen: dict[tuple, tuple] = {}
    for r in table.rows:
        key = tuple(r[i] for i in xi)
        if any(v is None for v in key):
            continue
        val = tuple(r[i] for i in yi)
        prev = seen.setdefault(key, val)
        if prev != val:
            return False
    return True


def hierarchy_ancestor_pairs(parents: Mapping[str, Sequence[str]]) -> frozenset[tuple[str, str]]:
    """Transitive (child, ancestor) pairs of a parent relation; rejects cycles."""
    nodes = set(parents)
    for ps in parents.values():
        nodes.update(ps)
    pairs: set[tuple[str, str]] = set()

    def ancestors(n, stack):
        if n in stack:
            raise InvalidHierarchy(f"cycle through attribute {n!r}")
        out = set()
        for p in parents.get(n, ()):
            out.add(p)
            out |= ancestors(p, stack | {n})
        return out

    for n in sorted(nodes):
        for a in ancestors(n, frozenset()):
            pairs.add((n, a))
    return frozenset(pairs)


def load_csv(
    text: str,
    name: str,
    kind: str,
    roles: Mapping[str, str],
    categories: Mapping[str, str],
    dimensions: Sequence[DimensionBinding],
    nullable: Mapping[str, bool] | None = None,
) -> AnalyticTable:
    """Build a table from CSV text. ``-`` or empty fields are nulls.

    Dimension tables are de-duplicated after load (duplicates dropped, the
    multiset is only transient); fact tables must be duplicate free.
    """
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise SchemaMismatch("empty CSV")
    header = [h.strip() for h in header]
    nullable = dict(nullable or {})

    dim_of = {}
    for b in dimensions:
        for a in b.attributes:
            dim_of[a] = b.name
    attrs = []
    for h in header:
        role = roles.get(h, DIMENSION if kind == DIMENSION_TABLE else MEASURE)
        cat = categories.get(h, DESC if role == DIMENSION else NUM)
        attrs.append(AttributeDef(h, role, cat, nullable.get(h, False), dim_of.get(h)))
    schema = Schema(tuple(attrs), tuple(dimensions))

    rows = []
    for raw in reader:
        if not raw or all(f.strip() == "" for f in raw):
            continue
        if len(raw) != len(attrs):
            raise SchemaMismatch(f"row arity {len(raw)} != header arity {len(attrs)}: {raw}")
        rows.append(tuple(parse_value(tok, a.category) for tok, a in zip(raw, attrs)))

    if kind == DIMENSION_TABLE:
        deduped, seen = [], set()
        for r in rows:
            if r not in seen:
                seen.add(r)
                deduped.append(r)
        if len(deduped) != len(rows):
            logger.warning("dimension table %s: dropped %d duplicate rows",
                           name, len(rows) - len(deduped))
        rows = deduped
    else:
        check_no_duplicates(rows, f"fact table {name!r}")

    # instance nulls imply nullability regardless of the declaration
    observed = [AttributeDef(a.name, a.role, a.category,
                             a.nullable or any(r[i] is None for r in rows),
                             a.dimension)
                for i, a in enumerate(attrs)]
    schema = Schema(tuple(observed), tuple(dimensions))
    return AnalyticTable(schema=schema, rows=tuple(rows), kind=kind, name=name)


def dump_csv(table: AnalyticTable) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(table.schema.names)
    for r in table.rows:
        writer.writerow([render_value(v) for v in r])
    return out.getvalue()
