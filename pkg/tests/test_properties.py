"""Randomised properties over generated instances, driven by hypothesis seeds."""
import random

from hypothesis import given, settings, strategies as st

from ete_assign import (
    Lottery,
    Mode,
    PriorityList,
    check_ete,
    ete_reassign,
    is_oe,
    marginal,
    serial_dictatorship,
    solve_re,
)
from ete_assign.efficiency import feasible_space

from .instances import explicit_instance, random_lottery, unit_demand_instance
from .oracles import min_rank_brute, reassign_by_definition, sd_brute

seeds = st.integers(min_value=0, max_value=10**6)
fast = settings(max_examples=60, deadline=None)


@fast
@given(seeds, st.sampled_from(list(Mode)))
def test_reassignment_is_ete_and_stays_feasible(seed, mode):
    p = explicit_instance(seed)
    Y = feasible_space(p)
    out = ete_reassign(random_lottery(random.Random(seed), p, Y), mode)
    assert check_ete(out)
    assert set(out.support) <= set(Y)
    assert sum(pr for _, pr in out.weights) == 1


@fast
@given(seeds)
def test_full_mode_matches_definition(seed):
    p = explicit_instance(seed)
    sigma = random_lottery(random.Random(seed), p, feasible_space(p))
    out = ete_reassign(sigma, Mode.FULL)
    want = {k: v for k, v in reassign_by_definition(sigma, p.partition).items() if v}
    assert {y.rows: pr for y, pr in out.weights} == want


@fast
@given(seeds)
def test_reassignment_is_idempotent_on_marginals(seed):
    p = explicit_instance(seed)
    once = ete_reassign(random_lottery(random.Random(seed), p, feasible_space(p)))
    twice = ete_reassign(once)
    for a in range(p.n_agents):
        assert marginal(once, a).same_distribution(marginal(twice, a))


@fast
@given(seeds, st.randoms(use_true_random=False))
def test_unit_demand_sd_matches_filtering_and_is_oe(seed, rng):
    p = unit_demand_instance(seed, max_agents=5)
    order = list(range(p.n_agents))
    rng.shuffle(order)
    Y = feasible_space(p)
    y = serial_dictatorship(p, PriorityList(tuple(order)))
    assert y == sd_brute(p, order, Y)
    assert is_oe(Lottery.point_mass(p, y), Y).holds


@fast
@given(seeds)
def test_matching_rank_value_matches_brute_force(seed):
    p = unit_demand_instance(seed)
    assert solve_re(p).value == min_rank_brute(p, feasible_space(p))
    assert solve_re(p, fast=False).value == solve_re(p).value
