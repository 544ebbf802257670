import json

import pytest
from hypothesis import given, settings, strategies as st

from ete_assign import Lottery
from ete_assign.io import (
    InputError,
    fraction_str,
    load_problem,
    lottery_from_doc,
    lottery_to_doc,
    parse_fraction,
    problem_from_doc,
    problem_to_doc,
    same_problem,
)
from ete_assign.repro import EXAMPLES, fixture

from .instances import explicit_instance, random_lottery, unit_demand_instance


@pytest.mark.parametrize("n", EXAMPLES)
def test_fixture_round_trip(n):
    doc = fixture(n)["problem"]
    p = problem_from_doc(doc)
    d1 = problem_to_doc(p)
    q = problem_from_doc(json.loads(json.dumps(d1)))
    assert same_problem(p, q)
    assert problem_to_doc(q) == d1


def test_linear_caps_round_trip():
    doc = fixture(4)["regionalCap"]
    p = problem_from_doc(doc)
    d1 = problem_to_doc(p)
    assert same_problem(problem_from_doc(d1), p)
    assert d1["feasible"]["linearCaps"]["caps"][0]["bound"] == "1"


@pytest.mark.parametrize("seed", range(30))
def test_random_round_trips(seed):
    import random
    for p in (explicit_instance(seed), unit_demand_instance(seed)):
        d = problem_to_doc(p)
        q = problem_from_doc(d)
        assert same_problem(p, q)
        if hasattr(p.feasible, "members"):
            sigma = random_lottery(random.Random(seed), p, p.feasible.sorted_members())
            ld = lottery_to_doc(sigma)
            assert lottery_from_doc(ld, q).weights == sigma.weights
            assert lottery_to_doc(lottery_from_doc(ld, q)) == ld


@settings(max_examples=200)
@given(st.fractions(min_value=0, max_value=10))
def test_fraction_strings(x):
    assert parse_fraction(fraction_str(x)) == x


@pytest.mark.parametrize("bad", ["0.5", "1/0", "", "a/b", "1//2"])
def test_rejects_non_rational_strings(bad):
    with pytest.raises(InputError):
        parse_fraction(bad)


def test_parse_error_has_line_and_column():
    with pytest.raises(InputError, match=r"prob.json:2:"):
        load_problem('{\n  "agents": [,]}', "prob.json")


def test_schema_error_has_path():
    doc = dict(fixture(6)["problem"])
    doc["feasible"] = {"unitDemandSimpleCapacity": {"capacity": {"o1": 0, "o2": 1, "o3": 1}}}
    with pytest.raises(InputError, match=r"\$\['feasible'\]\['unitDemandSimpleCapacity'\]\['capacity'\]\['o1'\]"):
        problem_from_doc(doc)


def test_unknown_agent_in_partition():
    doc = dict(fixture(2)["problem"])
    doc["partition"] = [["a1", "zz"], ["a2", "a3", "a4", "a5"]]
    with pytest.raises(InputError, match="unknown agent 'zz'"):
        problem_from_doc(doc)


def test_partition_and_by_preference_are_exclusive():
    doc = {**fixture(2)["problem"], "byPreference": True}
    with pytest.raises(InputError):
        problem_from_doc(doc)


def test_infeasible_lottery_member_named():
    p = problem_from_doc(fixture(6)["problem"])
    doc = {"lottery": [{"assignment": [[1, 0, 0], [1, 0, 0], [0, 0, 1]], "probability": "1"}]}
    with pytest.raises(InputError, match=r"\[\[1, 0, 0\], \[1, 0, 0\], \[0, 0, 1\]\] is not feasible"):
        lottery_from_doc(doc, p)


def test_lottery_probabilities_are_strings():
    p = problem_from_doc(fixture(6)["problem"])
    doc = {"lottery": [{"assignment": [[1, 0, 0], [0, 1, 0], [0, 0, 1]], "probability": 1}]}
    with pytest.raises(InputError):
        lottery_from_doc(doc, p)
