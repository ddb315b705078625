"""The seven operators against the worked single-letter tables."""

from decimal import Decimal

import pytest
from hypothesis import given, settings, strategies as st

from summar_guard import engine
from summar_guard.engine import And, BinOp, Comparison, Not, Ref
from summar_guard.errors import (
    AmbiguousPivotCell,
    MissingDimensionAttribute,
    NonDimensionGrouping,
    UnionDimensionOverlap,
)
from summar_guard.model import (
    AnalyticTable,
    AttributeDef,
    DIMENSION,
    DimensionBinding,
    FACT_TABLE,
    MEASURE,
    NUM,
    Schema,
)

D = Decimal


def fact(names, rows, dims=None, measures=("M", "N"), bindings=None):
    attrs = []
    for n in names:
        if n in measures:
            attrs.append(AttributeDef(n, MEASURE, NUM, True))
        else:
            attrs.append(AttributeDef(n, DIMENSION, nullable=True))
    if bindings is None:
        dim_names = [n for n in names if n not in measures]
        bindings = (DimensionBinding("D1", tuple(dim_names)),)
    return AnalyticTable(Schema(tuple(attrs), tuple(bindings)), tuple(rows), FACT_TABLE)


@pytest.fixture
def t_base():
    """The recurring 4-row example table with a nullable third attribute."""
    return fact(
        ("A1", "A2", "A3", "M", "N"),
        [
            ("a1", "b1", "c1", D(1), D(10)),
            ("a1", "b1", None, D(2), D(20)),
            ("a2", "b1", "c1", D(3), D(30)),
            ("a2", "b2", None, D(4), D(40)),
        ],
        bindings=(DimensionBinding("D1", ("A1", "A2")), DimensionBinding("D2", ("A3",))),
    )


def test_filter_equality(t_base):
    q1 = engine.filter_table(t_base, Comparison("A1", "=", "a1"))
    assert [r[0] for r in q1.rows] == ["a1", "a1"]


def test_filter_inequality_keeps_null_of_other_attr(t_base):
    q2 = engine.filter_table(t_base, Comparison("A2", "!=", "b2"))
    assert len(q2) == 3
    assert any(r[2] is None for r in q2.rows)


def test_filter_null_comparison_is_false(t_base):
    q = engine.filter_table(t_base, Comparison("A3", "<", "c0"))
    assert len(q) == 0  # nulls compare false, c1 > c0


def test_filter_literal_is_matches_null(t_base):
    q = engine.filter_table(t_base, Comparison("A3", "is", None))
    assert len(q) == 2


def test_filter_totality(t_base):
    p = And(Comparison("A1", "=", "a1"), Not(Comparison("A3", "is", None)))
    kept = engine.filter_table(t_base, p)
    dropped = engine.filter_table(t_base, Not(p))
    assert len(kept) + len(dropped) == len(t_base)


def test_project_keeps_rows(t_base):
    q3 = engine.project(t_base, ("A1", "A2", "A3", "M"))
    assert q3.schema.names == ("A1", "A2", "A3", "M")
    assert len(q3) == 4


def test_project_calc_sum(t_base):
    q4 = engine.project(t_base, ("A1", "A2", "A3"),
                        calcs=((BinOp("+", Ref("M"), Ref("N")), "M2"),))
    assert q4.column("M2") == [D(11), D(22), D(33), D(44)]


def test_project_calc_null_propagates():
    t = fact(("A1", "M", "N"), [("a", None, D(1))])
    q = engine.project(t, ("A1",), calcs=((BinOp("+", Ref("M"), Ref("N")), "S"),))
    assert q.column("S") == [None]


def test_project_requires_dimensions(t_base):
    with pytest.raises(MissingDimensionAttribute):
        engine.project(t_base, ("A1", "M"))


def test_aggregate_groups_nulls_together(t_base):
    q5 = engine.aggregate(t_base, "SUM", "M", ("A3",))
    assert dict((r[0], r[1]) for r in q5.rows) == {"c1": D(4), None: D(6)}


def test_aggregate_by_two(t_base):
    q6 = engine.aggregate(t_base, "SUM", "M", ("A1", "A3"))
    assert len(q6) == 4
    assert q6.schema.names == ("A1", "A3", "SUM(M)")


def test_aggregate_rejects_measure_grouping(t_base):
    with pytest.raises(NonDimensionGrouping):
        engine.aggregate(t_base, "SUM", "M", ("N",))


def test_aggregate_all_null_sum_is_null():
    t = fact(("A1", "M"), [("a", None), ("a", None)], measures=("M",))
    q = engine.aggregate(t, "SUM", "M", ("A1",))
    assert q.rows[0][1] is None
    qc = engine.aggregate(t, "COUNT", "M", ("A1",))
    assert qc.rows[0][1] == D(2)


def test_aggregate_min_idempotent(t_base):
    q = engine.aggregate(t_base, "MIN", "M", ("A1",))
    q2 = engine.aggregate(q, "MIN", "MIN(M)", ("A1",))
    assert sorted(map(str, q.column("MIN(M)"))) == sorted(map(str, q2.column("MIN(MIN(M))")))


def test_pivot_over_a1(t_base):
    q7 = engine.pivot(t_base, "M", ("A1",))
    assert q7.schema.names == ("A2", "A3", "M_a1", "M_a2")
    rows = {(r[0], r[1]): (r[2], r[3]) for r in q7.rows}
    assert rows[("b1", "c1")] == (D(1), D(3))
    assert rows[("b1", None)] == (D(2), None)
    assert rows[("b2", None)] == (None, D(4))


def test_pivot_over_a2(t_base):
    q8 = engine.pivot(t_base, "M", ("A2",))
    assert q8.schema.names == ("A1", "A3", "M_b1", "M_b2")
    rows = {(r[0], r[1]): (r[2], r[3]) for r in q8.rows}
    assert rows[("a1", "c1")] == (D(1), None)
    assert rows[("a2", None)] == (None, D(4))


def test_pivot_null_value_column():
    t = fact(("A1", "A2", "M"), [("a1", None, D(1)), ("a1", "b", D(2))])
    q = engine.pivot(t, "M", ("A2",))
    assert "M_NULL" in q.schema.names


def test_pivot_ambiguous_cell():
    t = fact(("A1", "A2", "M"), [("a1", "b", D(1)), ("a1", "b", D(2))])
    with pytest.raises(AmbiguousPivotCell):
        engine.pivot(t, "M", ("A2",))


@pytest.fixture
def merge_pair():
    t = fact(("A1", "A2", "A3", "M"),
             [("a1", "b1", "c1", D(1)),
              ("a1", None, "c2", D(2)),
              ("a2", "b1", "c3", D(3)),
              ("a3", None, "c2", D(4))],
             measures=("M",),
             bindings=(DimensionBinding("D1", ("A1", "A2", "A3"),
                                        frozenset({("A1", "A2"), ("A2", "A3"), ("A1", "A3")})),))
    t2 = fact(("A2", "A3", "N"),
              [("b1", "c1", D(10)),
               ("b1", "c3", D(20)),
               ("b2", "c4", D(30)),
               ("b3", "c4", D(40))],
              measures=("N",),
              bindings=(DimensionBinding("D2", ("A2", "A3"), frozenset({("A2", "A3")})),))
    return t, t2


def test_left_merge_example(merge_pair):
    t, t2 = merge_pair
    q10 = engine.merge("left", t, t2)
    assert q10.schema.names == ("A1", "A2", "A3", "M", "N")
    got = [(r[0], r[1], r[2], r[3], r[4]) for r in q10.rows]
    assert got == [
        ("a1", "b1", "c1", D(1), D(10)),
        ("a1", None, "c2", D(2), None),
        ("a2", "b1", "c3", D(3), D(20)),
        ("a3", None, "c2", D(4), None),
    ]


def test_left_merge_null_joins_null():
    t = fact(("A1", "M"), [(None, D(1))], measures=("M",))
    t2 = fact(("A1", "N"), [(None, D(9))], measures=("N",))
    q = engine.merge("left", t, t2)
    assert q.rows == ((None, D(1), D(9)),)


def test_merge_empty_right(merge_pair):
    t, t2 = merge_pair
    empty = AnalyticTable(t2.schema, (), FACT_TABLE)
    q = engine.merge("left", t, empty)
    assert len(q) == len(t)
    assert all(r[-1] is None for r in q.rows)


def test_full_merge_pads_both_sides(merge_pair):
    t, t2 = merge_pair
    q = engine.merge("full", t, t2)
    assert len(q) == 6  # 4 left rows + 2 unmatched right rows
    padded = [r for r in q.rows if r[0] is None]
    assert {(r[1], r[2]) for r in padded} == {("b2", "c4"), ("b3", "c4")}


def test_strict_merge(merge_pair):
    t, t2 = merge_pair
    q = engine.merge("strict", t, t2)
    assert len(q) == 2


def test_right_merge(merge_pair):
    t, t2 = merge_pair
    q = engine.merge("right", t, t2)
    assert len(q) == 4  # 2 matches + 2 right-only rows


@pytest.fixture
def set_pair():
    t = fact(("A1", "A2", "A3", "M"),
             [("a1", "b1", "c1", D(1)),
              ("a1", "b1", None, D(2)),
              ("a2", "b1", "c1", D(3)),
              ("a2", "b2", None, D(4))],
             measures=("M",))
    t2 = fact(("A1", "A2", "A3", "M"),
              [("a1", "b1", "c1", D(1)),
               ("a1", "b1", None, D(2)),
               ("a1", "b2", "c1", D(5)),
               ("a2", "b2", "c1", D(6)),
               ("a2", "b1", None, D(7))],
              measures=("M",))
    return t, t2


def test_union_rejected_on_overlap(set_pair):
    t, t2 = set_pair
    with pytest.raises(UnionDimensionOverlap):
        engine.union(t, t2)


def test_difference(set_pair):
    t, t2 = set_pair
    d = engine.difference(t, t2)
    assert set(d.rows) == {("a2", "b1", "c1", D(3)), ("a2", "b2", None, D(4))}


def test_difference_then_union(set_pair):
    t, t2 = set_pair
    u = engine.union(engine.difference(t, t2), t2)
    assert len(u) == 7
    assert engine.difference(t, t).rows == ()


def test_union_with_empty(set_pair):
    t, _ = set_pair
    empty = AnalyticTable(t.schema, (), FACT_TABLE)
    assert set(engine.union(t, empty).rows) == set(t.rows)


@settings(max_examples=50, deadline=None)
@given(st.data())
def test_pivot_round_trip_melts_back(data):
    """Un-pivoting the pivot reproduces exactly the non-null cells."""
    cells = st.sampled_from(["x", "y"])
    n = data.draw(st.integers(1, 8))
    rows = data.draw(st.lists(
        st.tuples(cells, cells, st.decimals(0, 9, places=0)),
        min_size=n, max_size=n, unique_by=lambda r: (r[0], r[1])))
    t = fact(("A1", "A2", "M"), rows, measures=("M",))
    p = engine.pivot(t, "M", ("A2",))
    melted = set()
    for r in p.rows:
        for j, col in enumerate(p.schema.names):
            if col.startswith("M_") and r[j] is not None:
                melted.add((r[0], col[2:], r[j]))
    assert melted == {(a, b, m) for a, b, m in rows}


def test_left_merge_projection_covers_left_input(merge_pair):
    t, t2 = merge_pair
    merged = engine.merge("left", t, t2)
    left_names = t.schema.names
    projected = {merged.project_values(left_names, r) for r in merged.rows}
    assert projected >= set(t.rows)
    # and when the join attributes determine the right schema the projected
    # multiset equals the left input exactly
    from summar_guard.model import lfd_holds
    if lfd_holds(t2, ("A2", "A3"), t2.schema.names):
        rows = [merged.project_values(left_names, r) for r in merged.rows]
        assert sorted(map(str, rows)) == sorted(map(str, t.rows))
