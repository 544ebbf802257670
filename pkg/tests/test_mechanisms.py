import random

import pytest

from ete_assign import (
    ExplicitSet,
    Lottery,
    NotConsecutiveEquals,
    PriorityList,
    Problem,
    check_consecutive_equals,
    is_oe,
    make_consecutive_equals,
    run_pipeline,
    serial_dictatorship,
)
from ete_assign.efficiency import feasible_space
from ete_assign.io import problem_from_doc
from ete_assign.mechanisms import NotDownwardClosed
from ete_assign.repro import fixture

from .instances import explicit_instance, random_priority, unit_demand_instance
from .oracles import sd_brute


def test_consecutive_equals_detection():
    part = ((0, 1), (2,), (3, 4))
    assert check_consecutive_equals(PriorityList((2, 1, 0, 4, 3)), part)
    assert not check_consecutive_equals(PriorityList((0, 2, 1, 3, 4)), part)
    assert not check_consecutive_equals(PriorityList((3, 0, 1, 2, 4)), part)


def test_make_consecutive_equals_orders():
    part = ((0, 1), (2,), (3, 4))
    assert make_consecutive_equals(part).order == (0, 1, 2, 3, 4)
    alpha = make_consecutive_equals(part, (2, 0, 1), [(1, 0), (0,), (1, 0)])
    assert alpha.order == (4, 3, 1, 0, 2)
    assert check_consecutive_equals(alpha, part)


def test_priority_list_must_be_permutation():
    with pytest.raises(ValueError):
        PriorityList((0, 0, 1))


def test_single_agent_gets_top_bundle():
    fx = fixture(6)
    doc = dict(fx["problem"])
    doc = {**doc, "agents": ["a1"], "preferences": {"a1": [2, 0, 1]}}
    p = problem_from_doc(doc)
    y = serial_dictatorship(p, PriorityList((0,)))
    assert y.rows[0] == p.universe[2]


def test_example5_lists():
    fx = fixture(5)
    p = problem_from_doc(fx["problem"])
    ok = run_pipeline(p, PriorityList.from_labels(p, fx["withinGroupList"]))
    assert is_oe(ok).holds
    bad_list = PriorityList.from_labels(p, fx["interleavedList"])
    with pytest.raises(NotConsecutiveEquals):
        run_pipeline(p, bad_list)
    bad = run_pipeline(p, bad_list, enforce_consecutive=False)
    assert not is_oe(bad).holds


def test_sd_refuses_non_downward_closed():
    p = problem_from_doc(fixture(3)["problem"])
    with pytest.raises(NotDownwardClosed):
        serial_dictatorship(p, PriorityList((0, 1, 2, 3)))


@pytest.mark.parametrize("seed", range(80))
def test_sd_matches_filtering_oracle_on_closed_sets(seed):
    p = explicit_instance(seed, closed=True)
    alpha = random_priority(random.Random(seed), p.n_agents)
    assert serial_dictatorship(p, PriorityList(alpha)) == sd_brute(p, alpha, feasible_space(p))


@pytest.mark.parametrize("seed", range(80))
def test_sd_matches_filtering_oracle_on_unit_demand(seed):
    p = unit_demand_instance(seed)
    alpha = random_priority(random.Random(seed), p.n_agents)
    assert serial_dictatorship(p, PriorityList(alpha)) == sd_brute(p, alpha, feasible_space(p))
