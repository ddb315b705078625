"""Acceptance criteria, one test per criterion, exact tolerances.

Run with ``pytest tests/test_acceptance.py -s`` to see one PASS line per
criterion.
"""

import random
import time
from decimal import Decimal
from itertools import combinations
from pathlib import Path

from summar_guard import engine
from summar_guard.engine import Aggregate, And, Comparison, Filter, Merge
from summar_guard.funcs import apply_fn
from summar_guard.graph import BOTTOM, TOP, discover
from summar_guard.properties import BASIC, GSUM, SUM_MODE, propagate
from summar_guard.session import Session
from summar_guard.summarizability import oracle_summarizable

from conftest import (
    declare_dem,
    declare_merge_fixture,
    declare_product_list,
    declare_store_sales,
)
from randgen import random_valid_aggregate, run_random_query
from test_soundness import allowed_decisions, check_gsum_emission

D = Decimal
SESSIONS = Path(__file__).resolve().parent.parent / "sessions"


def report(n, text):
    print(f"ACCEPTANCE {n}: PASS — {text}")


def test_criterion_1_city_count_session():
    start = time.perf_counter()
    s = Session(mode=SUM_MODE)
    declare_dem(s)
    _, v1 = s.apply(Aggregate("COUNTDISTINCT", "City", ("State", "Country"),
                              alias="NB_CITIES"), ["DEM"], alias="T1")
    assert v1.accepted
    t1 = s.resolve("T1")
    assert len(t1) == 4
    assert {(r[0], r[1]): r[2] for r in t1.rows} == {
        ("Ohio", "USA"): D(1),
        ("California", "USA"): D(3),
        (None, "USA"): D(1),
        (None, "Ireland"): D(1),
    }
    node, v2 = s.apply(Aggregate("SUM", "NB_CITIES", ("Country",)), ["T1"])
    assert node is None and not v2.accepted

    s2 = Session(mode=SUM_MODE)
    declare_dem(s2)
    s2.apply(Aggregate("COUNT", "City", ("State", "Country"), alias="NB_CITIES"),
             ["DEM"], alias="T1")
    _, v3 = s2.apply(Aggregate("SUM", "NB_CITIES", ("Country",)), ["T1"], alias="T2")
    assert v3.accepted
    assert {r[0]: r[1] for r in s2.resolve("T2").rows} == {"USA": D(7), "Ireland": D(1)}
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0
    report(1, f"distinct-count session: 1/3/1/1, SUM rejected, COUNT variant 7/1 "
              f"({elapsed:.2f}s)")


def test_criterion_2_store_sales_session():
    start = time.perf_counter()
    s = Session(mode=GSUM)
    declare_store_sales(s)
    declare_dem(s)
    s.apply(Filter(And(Comparison("Country", "=", "USA"),
                       Comparison("Year", "=", "2018"))),
            ["STORE_SALES"], alias="T3")
    s.apply(Aggregate("SUM", "Amount", ("City", "State", "Country", "Year")),
            ["T3"], alias="T4")
    t4 = {(r[0], r[1]): r[4] for r in s.resolve("T4").rows}
    assert t4 == {
        ("Dublin", "California"): D("6.7"),
        ("San Jose", "California"): D("22.8"),
        ("Dublin", "Ohio"): D("1.2"),
        ("Washington DC", None): D("43.7"),
    }
    s.apply(Merge("left", ("City", "State", "Country", "Year")),
            ["T4", "DEM"], alias="T5")
    node, verdict = s.apply(Aggregate("SUM", "Pop", ("State", "Country", "Year")),
                            ["T5"])
    assert node is None and not verdict.accepted

    s.apply(Aggregate("SUM", "Pop", ("State", "Country", "Year")), ["DEM"],
            alias="DEM2")
    s.apply(Aggregate("SUM", "Amount", ("State", "Country", "Year")), ["T3"],
            alias="T4B")
    s.apply(Merge("left", ("State", "Country", "Year")), ["T4B", "DEM2"],
            alias="FINAL")
    final = {r[0]: (r[3], r[4]) for r in s.resolve("FINAL").rows}
    assert final == {
        "California": (D("29.5"), D(1157)),
        "Ohio": (D("1.2"), D(44)),
        None: (D("43.7"), D(672)),
    }
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0
    report(2, f"store-sales session: T4 exact, naive SUM(Pop) rejected, "
              f"final 29.5/1.2/43.7 with 1157/44/672 ({elapsed:.2f}s)")


def test_criterion_3_attribute_graphs():
    from test_graph import make_dim

    salesorg = make_dim("SALESORG", ("Store_Id", "City", "State", "Country"), [
        ("Oh_01", "Dublin", "Ohio", "USA"),
        ("Ca_01", "Dublin", "California", "USA"),
        ("Ca_02", "Palo Alto", "California", "USA"),
        ("Pa_01", "Paris", None, "France"),
        ("Ly_01", "Lyon", None, "France"),
        ("Ir_01", "Dublin", None, "Ireland"),
    ], nullable=("City",))
    g = discover(salesorg, {"Store_Id": ["City"], "City": ["State"],
                            "State": ["Country"]})
    labelled = {(u, v, l) for u, v, l in g.edges if u != BOTTOM and v != TOP}
    assert labelled == {
        ("Store_Id", "City", "f"),
        ("City", "State", "+"),
        ("State", "Country", "1"),
        ("Store_Id", "State", "f"),
        ("Store_Id", "Country", "f"),
        ("City", "Country", "+"),
    }
    assert g.label(BOTTOM, "Store_Id") == "+"
    assert g.label("Country", TOP) == "f"

    prod = make_dim("PROD", ("Prod_Sku", "Brand", "Country", "Subcategory",
                             "Category"), [
        ("coco-can-33cl", "Coco Cola", "USA", "Soft Drinks", "Drinks"),
        ("coco-can-25cl", "Coco Cola", "USA", "Soft Drinks", "Drinks"),
        ("cz-tshirt-s", "Zora", "Spain", "Woman Tops", "Clothes"),
        ("cz-tshirt-s", "Coco Cola", "USA", "Woman Tops", "Clothes"),
    ])
    gp = discover(prod, {"Prod_Sku": ["Brand", "Subcategory"],
                         "Brand": ["Country"], "Subcategory": ["Category"]})
    labelled_p = {(u, v, l) for u, v, l in gp.edges if u != BOTTOM and v != TOP}
    assert labelled_p == {
        ("Prod_Sku", "Brand", "+"),
        ("Brand", "Country", "f"),
        ("Prod_Sku", "Subcategory", "f"),
        ("Subcategory", "Category", "f"),
    }
    assert gp.label(BOTTOM, "Prod_Sku") == "+"
    assert gp.label("Country", TOP) == "f" and gp.label("Category", TOP) == "f"
    report(3, "attribute graphs reproduce both worked figures edge-for-edge")


def test_criterion_4_summarizability_preserving_propagation():
    s = Session(mode=SUM_MODE)
    declare_product_list(s)
    t = s.resolve("PRODUCT_LIST")

    spec = Aggregate("COUNT", "Prod_Sku", ("Brand", "Country", "Year"))
    r = engine.run_spec(spec, [t])
    props = [p for p in propagate(spec, [t], r, SUM_MODE)
             if p.attribute == "COUNT(Prod_Sku)"]
    assert {(p.fn, p.x) for p in props} == {
        ("SUM", frozenset({"Brand", "Country", "Year"}))}

    spec2 = Aggregate("COUNTDISTINCT", "Prod_Sku", ("Brand", "Country", "Year"))
    r2 = engine.run_spec(spec2, [t])
    props2 = [p for p in propagate(spec2, [t], r2, SUM_MODE)
              if p.attribute == "COUNTDISTINCT(Prod_Sku)"]
    assert {(p.fn, p.x) for p in props2} == {("SUM", frozenset({"Country"}))}
    assert "K={Brand, Year}" in props2[0].note
    report(4, "roll-up propagation: COUNT keeps the grouping set, "
              "COUNTDISTINCT shrinks to {Country} via K={Brand, Year}")


def test_criterion_5_merge_propagation():
    s = Session(mode=BASIC)
    declare_merge_fixture(s)
    left = s.resolve("STORE_SALES_YEARLY")
    right = s.resolve("DEM2")
    spec = Merge("left", ("City", "Year"))
    r = engine.run_spec(spec, [left, right])
    props = propagate(spec, [left, right], r, BASIC)
    amount = {p.fn: p.x for p in props if p.attribute == "Amount"}
    assert amount["SUM"] == frozenset(
        {"Store_Id", "Year", "City", "State", "Country"})
    unemp = {p.fn: p.x for p in props if p.attribute == "Unemp"}
    assert unemp["MIN"] == frozenset({"City", "State", "Country", "Year"})
    assert unemp["MAX"] == frozenset({"City", "State", "Country", "Year"})
    report(5, "merge propagation: Amount's closure gains the joined geography, "
              "Unemp unchanged")


def test_criterion_6_property_based_soundness():
    start = time.perf_counter()
    rng = random.Random(61803)
    gsum_failures: list = []
    sum_failures: list = []
    instances = 0
    while instances < 500:
        picked = run_random_query(rng)
        if picked is None:
            continue
        instances += 1
        spec, inputs, result = picked
        check_gsum_emission(spec, inputs, result, gsum_failures, instances)
        t = inputs[0]
        agg = random_valid_aggregate(rng, t)
        if agg is not None:
            agg_result = engine.run_spec(agg, [t])
            for p in propagate(agg, [t], agg_result, SUM_MODE):
                if p.attribute != agg.result_name:
                    continue
                y = list(agg.by)
                base = set(y) - set(p.x)
                rest = [a for a in y if a not in base]
                for k in range(len(rest) + 1):
                    for extra in combinations(rest, k):
                        z2 = sorted(base | set(extra))
                        if not oracle_summarizable(t, agg.attr, agg.fn, p.fn, y, z2):
                            sum_failures.append((agg, p, z2))
    elapsed = time.perf_counter() - start
    assert not gsum_failures, gsum_failures[0]
    assert not sum_failures, sum_failures[0]
    assert elapsed < 60.0
    report(6, f"500 random instances, every emitted property certified by its "
              f"oracle, zero counterexamples ({elapsed:.1f}s)")


def test_criterion_7_distributivity_witnesses():
    v1, v2 = [D(1), D(2)], [D(2), D(3)]
    recombined = apply_fn("SUM", [apply_fn("COUNTDISTINCT", v1),
                                  apply_fn("COUNTDISTINCT", v2)])
    direct = apply_fn("COUNTDISTINCT", v1 + v2)
    assert (recombined, direct) == (D(4), D(3))

    values = [D(1), D(2), D(2), D(3), D(5)]
    idx = range(len(values))
    checked = 0
    for r in range(len(values) + 1):
        for picked in combinations(idx, r):
            left = [values[i] for i in picked]
            right = [values[i] for i in idx if i not in picked]
            blocks = [b for b in (left, right) if b]
            if not blocks:
                continue
            assert apply_fn("SUM", [apply_fn("COUNT", b) for b in blocks]) == D(5)
            checked += 1
    assert checked == 2 ** len(values)
    report(7, "COUNTDISTINCT witness 4 ≠ 3 reproduced; COUNT/SUM equal on all "
              "32 two-block partitionings")


def test_criterion_8_mode_monotonicity():
    # fixtures
    fixture_declares = (declare_dem, declare_store_sales, declare_product_list,
                        declare_merge_fixture)
    for declare in fixture_declares:
        per_mode = {}
        for mode in (BASIC, SUM_MODE, GSUM):
            s = Session(mode=mode)
            declare(s)
            decisions = set()
            for name, table in s.base_tables.items():
                if table.kind == "FactTable":
                    decisions |= {(name,) + d for d in allowed_decisions(table)}
            per_mode[mode] = decisions
        assert per_mode[GSUM] <= per_mode[SUM_MODE] <= per_mode[BASIC]

    # random instances
    rng = random.Random(31415)
    checked = 0
    while checked < 200:
        picked = run_random_query(rng)
        if picked is None:
            continue
        spec, inputs, result = picked
        per_mode = {}
        for mode in (BASIC, SUM_MODE, GSUM):
            props = propagate(spec, inputs, result, mode)
            per_mode[mode] = allowed_decisions(result.with_metadata(properties=props))
        assert per_mode[GSUM] <= per_mode[SUM_MODE] <= per_mode[BASIC]
        checked += 1
    report(8, "allowed-aggregation sets nest gsum ⊆ sum ⊆ basic on fixtures "
              "and 200 random instances")


def test_criterion_9_cli_replay():
    from summar_guard.cli import run_script

    cases = [("fig1_incorrect", 1), ("fig1_correct", 0), ("fig3_final", 1),
             ("product_list", 1)]
    for name, strict_code in cases:
        script = SESSIONS / f"{name}.sg"
        golden = (SESSIONS / "golden" / f"{name}.txt").read_text("utf-8")
        code, transcript = run_script(script, GSUM, allow_reject=True,
                                      json_events=False)
        assert transcript == golden, f"transcript drift for {name}"
        assert code == 0
        code_strict, _ = run_script(script, GSUM, allow_reject=False,
                                    json_events=False)
        assert code_strict == strict_code
    golden_json = (SESSIONS / "golden" / "fig1_incorrect.jsonl").read_text("utf-8")
    _, json_transcript = run_script(SESSIONS / "fig1_incorrect.sg", GSUM,
                                    allow_reject=True, json_events=True)
    assert json_transcript == golden_json
    report(9, "all committed session scripts replay byte-for-byte with the "
              "specified exit codes")
