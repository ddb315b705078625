"""Randomized soundness of the propagation rules against the oracles.

Any property the rules emit must be backed by the corresponding brute-force
equality: zero counterexamples tolerated.
"""

import random
from itertools import combinations

from summar_guard import engine
from summar_guard.engine import Aggregate
from summar_guard.properties import (
    BASIC,
    GSUM,
    SUM_MODE,
    allowing_property,
    propagate,
)
from summar_guard.funcs import applicable_functions
from summar_guard.summarizability import (
    oracle_g_summarizable,
    oracle_summarizable,
    shared_dimension_attributes,
)

from randgen import gen_instance, random_valid_aggregate, run_random_query

N_GSUM_INSTANCES = 500
N_SUM_INSTANCES = 200
N_MONOTONE_INSTANCES = 200


def home_tables(spec, inputs, attribute):
    """The input tables whose guarantee a propagated property expresses."""
    from summar_guard.engine import Difference, Merge, Union

    if isinstance(spec, Merge):
        left, right = inputs
        on = spec.on or tuple(engine.common_dimension_attributes(left, right))
        if attribute in on:
            # join attributes are propagated from the preserved side (the
            # left input for full/strict merges)
            return [right if spec.kind == "right" else left]
        if left.schema.has(attribute) and not right.schema.has(attribute):
            return [left]
        if right.schema.has(attribute) and not left.schema.has(attribute):
            return [right]
        # a name contested by both sides keeps the left column in the result
        return [left] if left.schema.has(attribute) else []
    if isinstance(spec, Union):
        return list(inputs)
    if isinstance(spec, Difference):
        return [inputs[0]]
    return [inputs[0]]


def check_gsum_emission(spec, inputs, result, failures, tag):
    props = propagate(spec, inputs, result, GSUM)
    for p in props:
        if isinstance(spec, Aggregate) and p.attribute == spec.result_name:
            continue  # new measure: covered by the summarizability oracle
        for t in home_tables(spec, inputs, p.attribute):
            if not t.schema.has(p.attribute) or not result.schema.has(p.attribute):
                continue
            shared = set(shared_dimension_attributes(t, result))
            z = shared - set(p.x)
            ok = oracle_g_summarizable(t, result, p.attribute, p.fn, z)
            if not ok:
                failures.append((tag, spec, p, sorted(z)))


def test_gsum_properties_pass_oracle():
    rng = random.Random(20240811)
    failures = []
    produced = 0
    for i in range(N_GSUM_INSTANCES):
        picked = run_random_query(rng)
        if picked is None:
            continue
        spec, inputs, result = picked
        produced += 1
        check_gsum_emission(spec, inputs, result, failures, i)
    assert produced > N_GSUM_INSTANCES * 0.7
    assert not failures, f"{len(failures)} counterexamples, first: {failures[0]}"


def test_sum_mode_aggregates_pass_oracle():
    rng = random.Random(77002)
    failures = []
    produced = 0
    for i in range(N_SUM_INSTANCES):
        session, t, _ = gen_instance(rng)
        spec = random_valid_aggregate(rng, t)
        if spec is None:
            continue
        result = engine.run_spec(spec, [t])
        produced += 1
        props = propagate(spec, [t], result, SUM_MODE)
        y = list(spec.by)
        for p in props:
            if p.attribute != spec.result_name:
                continue
            rest = [a for a in y if a not in set(y) - set(p.x)]
            base = set(y) - set(p.x)
            for k in range(len(rest) + 1):
                for extra in combinations(rest, k):
                    z2 = sorted(base | set(extra))
                    if not oracle_summarizable(t, spec.attr, spec.fn, p.fn, y, z2):
                        failures.append((i, spec, p, z2))
    assert produced > N_SUM_INSTANCES * 0.5
    assert not failures, f"{len(failures)} counterexamples, first: {failures[0]}"


def allowed_decisions(table):
    dims = table.schema.dimension_names
    out = set()
    for attr in table.schema.names:
        cat = table.schema.attribute(attr).category
        for fn in applicable_functions(cat):
            for k in range(len(dims) + 1):
                for by in combinations(dims, k):
                    if attr not in by and allowing_property(table, fn, attr, by):
                        out.add((fn, attr, by))
    return out


def test_mode_monotonicity_random():
    rng = random.Random(99105)
    checked = 0
    for _ in range(N_MONOTONE_INSTANCES):
        picked = run_random_query(rng)
        if picked is None:
            continue
        spec, inputs, result = picked
        decisions = {}
        for mode in (BASIC, SUM_MODE, GSUM):
            props = propagate(spec, inputs, result, mode)
            decisions[mode] = allowed_decisions(result.with_metadata(properties=props))
        assert decisions[GSUM] <= decisions[SUM_MODE] <= decisions[BASIC], \
            f"monotonicity violated for {spec}: " \
            f"gsum-extra={decisions[GSUM] - decisions[SUM_MODE]} " \
            f"sum-extra={decisions[SUM_MODE] - decisions[BASIC]}"
        checked += 1
    assert checked > N_MONOTONE_INSTANCES * 0.7
