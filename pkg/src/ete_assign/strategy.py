"""Manipulation search for the report-driven ETE mechanism.

Agents report orders, equals are recomputed from the reports, a
consecutive-equals priority list is picked from the reported profile,
serial dictatorship runs, and the result is ETE-reassigned.
"""
from __future__ import annotations

import dataclasses
import itertools
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Optional, Sequence

from .core import Partition, Problem, Ranking, partition_by_preference
from .ete import Mode
from .feasibility import EnumerationBudgetExceeded
from .lottery import Dominance, Lottery, Marginal, fosd, marginal
from .mechanisms import (
    NotConsecutiveEquals,
    PriorityList,
    check_consecutive_equals,
    make_consecutive_equals,
    run_pipeline,
)

SelectionRule = Callable[[tuple[Ranking, ...], Partition], PriorityList]

DEFAULT_MISREPORT_LIMIT = 40_320  # 8!


def group_order(reports: tuple[Ranking, ...], partition: Partition) -> PriorityList:
    """Groups in index order, agents in index order inside each group."""
    return make_consecutive_equals(partition)


@dataclass
class TableRule:
    """Priority lists keyed by the reported partition, with a fallback rule."""

    table: Mapping[Partition, Sequence[int]]
    fallback: SelectionRule = group_order

    def __call__(self, reports: tuple[Ranking, ...], partition: Partition) -> PriorityList:
        key = tuple(tuple(g) for g in partition)
        if key in self.table:
            return PriorityList(tuple(self.table[key]))
        return self.fallback(reports, partition)


@dataclass(frozen=True)
class ReportProfile:
    orders: tuple[Ranking, ...]
    rule: SelectionRule = group_order

    def replace(self, agent: int, order: Ranking) -> ReportProfile:
        orders = list(self.orders)
        orders[agent] = tuple(order)
        return dataclasses.replace(self, orders=tuple(orders))


def reported_problem(reports: ReportProfile, p: Problem, by_preference: bool = True) -> Problem:
    """``p`` with the reported orders; equals are re-derived from them by default."""
    orders = tuple(tuple(o) for o in reports.orders)
    partition = partition_by_preference(orders) if by_preference else p.partition
    return dataclasses.replace(p, preferences=orders, partition=partition)


def mechanism_f(
    reports: ReportProfile,
    p: Problem,
    by_preference: bool = True,
    mode: Mode = Mode.CYCLIC,
) -> Lottery:
    q = reported_problem(reports, p, by_preference)
    alpha = reports.rule(q.preferences, q.partition)
    if not check_consecutive_equals(alpha, q.partition):
        raise NotConsecutiveEquals(
            f"selection rule returned {alpha.order}, which splits a group of equals")
    return run_pipeline(q, alpha, mode)


@dataclass(frozen=True)
class ManipulationFinding:
    agent: int
    misreport: Ranking
    truthful: Marginal
    manipulated: Marginal
    verdict: Dominance


def find_manipulation(
    truth: ReportProfile,
    p: Problem,
    agents: Optional[Iterable[int]] = None,
    misreports: Optional[Iterable[Ranking]] = None,
    mechanism: Optional[Callable[[ReportProfile], Lottery]] = None,
    limit: int = DEFAULT_MISREPORT_LIMIT,
) -> Optional[ManipulationFinding]:
    """First misreport that strictly improves an agent's lottery.

    Improvement means the manipulated marginal strictly first-order
    stochastically dominates the truthful one under the agent's true order.
    Agents are scanned in index order (or the given order); misreports in
    the given order, or every strict order over the universe in
    lexicographic order of bundle indices.
    """
    if mechanism is None:
        def mechanism(profile: ReportProfile) -> Lottery:
            return mechanism_f(profile, p)

    k = len(p.universe)
    if misreports is None:
        if math.factorial(k) > limit:
            raise EnumerationBudgetExceeded(limit, "candidate misreports")
        candidates = list(itertools.permutations(range(k)))
    else:
        candidates = [tuple(r) for r in misreports]

    honest = mechanism(truth)
    scan = range(p.n_agents) if agents is None else agents
    for a in scan:
        true_order = tuple(truth.orders[a])
        ranking = tuple(p.universe[i] for i in true_order)
        m_true = _marginal_in_universe(honest, a, ranking)
        for lie in candidates:
            if tuple(lie) == true_order:
                continue
            outcome = mechanism(truth.replace(a, lie))
            m_lie = _marginal_in_universe(outcome, a, ranking)
            verdict = fosd(ranking, m_true, m_lie)
            if verdict is Dominance.DOMINATED_STRICT:
                return ManipulationFinding(a, tuple(lie), m_true, m_lie, verdict)
    return None


def _marginal_in_universe(sigma: Lottery, agent: int, ranking) -> Marginal:
    m = marginal(sigma, agent)
    return Marginal(agent, m.dist, tuple(ranking))
