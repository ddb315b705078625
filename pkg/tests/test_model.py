"""Literal equality, dependency checks and table construction."""

from decimal import Decimal

import pytest
from hypothesis import given, strategies as st

from summar_guard.errors import DuplicateTuple, UnknownAttribute
from summar_guard.model import (
    AnalyticTable,
    AttributeDef,
    DIMENSION,
    DIMENSION_TABLE,
    FACT_TABLE,
    MEASURE,
    Schema,
    dump_csv,
    lfd_holds,
    literal_eq,
    load_csv,
    nfd_holds,
    parse_value,
)

VALUES = [None, "Dublin", "Ohio", Decimal("6.7"), Decimal("43.7")]


def test_literal_eq_nulls():
    assert literal_eq(None, None)
    assert literal_eq("Dublin", "Dublin")
    assert not literal_eq("Dublin", None)
    assert not literal_eq(None, "Dublin")


@given(st.sampled_from(VALUES), st.sampled_from(VALUES), st.sampled_from(VALUES))
def test_literal_eq_is_an_equivalence(a, b, c):
    assert literal_eq(a, a)
    assert literal_eq(a, b) == literal_eq(b, a)
    if literal_eq(a, b) and literal_eq(b, c):
        assert literal_eq(a, c)


def test_parse_value():
    assert parse_value("-", "DESC") is None
    assert parse_value("", "NUM") is None
    assert parse_value("6.7", "NUM") == Decimal("6.7")
    assert parse_value("2018", "DESC") == "2018"


def _table(rows, names=("A", "B", "C")):
    attrs = tuple(AttributeDef(n, DIMENSION) for n in names)
    return AnalyticTable(Schema(attrs), tuple(rows), DIMENSION_TABLE)


SALESORG_ROWS = [
    ("Oh_01", "Dublin", "Ohio", "USA"),
    ("Ca_01", "Dublin", "California", "USA"),
    ("Ca_02", "Palo Alto", "California", "USA"),
    ("Pa_01", "Paris", None, "France"),
    ("Ly_01", "Lyon", None, "France"),
    ("Ir_01", "Dublin", None, "Ireland"),
]


@pytest.fixture
def salesorg():
    return _table(SALESORG_ROWS, names=("Store_Id", "City", "State", "Country"))


def test_lfd_store_id_determines_geography(salesorg):
    assert lfd_holds(salesorg, ["Store_Id"], ["City", "State", "Country"])


def test_lfd_city_does_not_determine_state(salesorg):
    # Dublin maps to Ohio, California and a null state
    assert not lfd_holds(salesorg, ["City"], ["State"])


def test_lfd_state_does_not_determine_country(salesorg):
    # the null state maps to both France and Ireland
    assert not lfd_holds(salesorg, ["State"], ["Country"])
    # but the dependency holds over non-null states
    assert nfd_holds(salesorg, ["State"], ["Country"])


def test_nfd_city_country_fails(salesorg):
    assert not nfd_holds(salesorg, ["City"], ["Country"])


def test_nfd_reflexive(salesorg):
    assert nfd_holds(salesorg, ["City"], ["City"])


def test_lfd_unknown_attribute(salesorg):
    with pytest.raises(UnknownAttribute):
        lfd_holds(salesorg, ["Nope"], ["City"])


@given(st.data())
def test_lfd_implies_nfd_and_is_monotone(data):
    n_rows = data.draw(st.integers(0, 8))
    cell = st.one_of(st.none(), st.sampled_from(["a", "b", "c"]))
    rows = data.draw(st.lists(st.tuples(cell, cell, cell),
                              min_size=n_rows, max_size=n_rows))
    t = _table(rows)
    names = list(t.schema.names)
    x = data.draw(st.sets(st.sampled_from(names), min_size=1))
    y = data.draw(st.sets(st.sampled_from(names), min_size=1))
    if lfd_holds(t, x, y):
        assert nfd_holds(t, x, y)
        bigger = x | set(data.draw(st.sets(st.sampled_from(names))))
        assert lfd_holds(t, bigger, y)


def test_fact_table_rejects_duplicates():
    csv_text = "A,M\nx,1\nx,1\n"
    with pytest.raises(DuplicateTuple):
        load_csv(csv_text, "T", FACT_TABLE, roles={"A": DIMENSION, "M": MEASURE},
                 categories={"M": "NUM"}, dimensions=())


def test_dimension_table_drops_duplicates():
    csv_text = "A,B\nx,y\nx,y\nz,w\n"
    t = load_csv(csv_text, "D", DIMENSION_TABLE, roles={}, categories={}, dimensions=())
    assert len(t) == 2


def test_csv_round_trip():
    csv_text = "City,Pop\nDublin,61\n-,672\n"
    t = load_csv(csv_text, "T", FACT_TABLE, roles={"City": DIMENSION, "Pop": MEASURE},
                 categories={"Pop": "NUM"}, dimensions=())
    assert dump_csv(t) == csv_text
    assert t.rows[1][0] is None


def test_tuple_literal_eq_componentwise():
    from summar_guard.model import tuple_literal_eq

    assert tuple_literal_eq((None, "a"), (None, "a"))
    assert not tuple_literal_eq((None, "a"), ("x", "a"))
    assert not tuple_literal_eq(("a",), ("a", "b"))
