"""Pareto, ex-post, ordinal and rank-minimizing efficiency checks."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .core import Problem, RankTable
from .feasibility import (
    DEFAULT_LIMIT,
    PureAssignment,
    UnitDemandSimpleCapacity,
    enumerate_assignments,
)
from .lottery import Dominance, Lottery, fosd, marginal, upper_cdf_profile
from .simplex import maximize

__all__ = [
    "RankTable", "EfficiencyReport", "OECheck", "pareto_efficient", "is_ee", "is_oe",
    "rank_value", "solve_re", "is_re", "efficiency_report", "feasible_space",
]


def feasible_space(p: Problem, limit: int = DEFAULT_LIMIT) -> list[PureAssignment]:
    """Enumerated ``Y``, cached on the problem per budget."""
    key = ("space", limit)
    if key not in p.memo:
        p.memo[key] = enumerate_assignments(p.feasible, p, limit=limit)
    return p.memo[key]


def _space(p: Problem, Y: Optional[Sequence[PureAssignment]]) -> Sequence[PureAssignment]:
    return feasible_space(p) if Y is None else Y


def pareto_dominates(p: Problem, z: PureAssignment, y: PureAssignment) -> bool:
    r = p.ranks
    better = False
    for a in range(p.n_agents):
        rz, ry = r(z.rows[a], a), r(y.rows[a], a)
        if rz > ry:
            return False
        better = better or rz < ry
    return better


@dataclass(frozen=True)
class ParetoCheck:
    holds: bool
    witness: Optional[PureAssignment] = None

    def __bool__(self):
        return self.holds


def pareto_efficient(y: PureAssignment, p: Problem, Y: Optional[Sequence[PureAssignment]] = None) -> ParetoCheck:
    for z in _space(p, Y):
        if pareto_dominates(p, z, y):
            return ParetoCheck(False, z)
    return ParetoCheck(True)


@dataclass(frozen=True)
class EECheck:
    holds: bool
    inefficient: Optional[PureAssignment] = None
    dominator: Optional[PureAssignment] = None

    def __bool__(self):
        return self.holds


def is_ee(sigma: Lottery, Y: Optional[Sequence[PureAssignment]] = None) -> EECheck:
    Y = _space(sigma.problem, Y)
    for y in sigma.support:
        chk = pareto_efficient(y, sigma.problem, Y)
        if not chk:
            return EECheck(False, y, chk.witness)
    return EECheck(True)


def rank_value(sigma: Lottery, ranks: Optional[RankTable] = None) -> Fraction:
    """Expected total rank over agents."""
    ranks = sigma.problem.ranks if ranks is None else ranks
    return sum((pr * ranks.total(y) for y, pr in sigma.weights), Fraction(0))


@dataclass(frozen=True)
class OECheck:
    """Ordinal-efficiency verdict.

    ``gap`` is the optimum of the dominance program, i.e. how much the
    summed upper cumulative probabilities can be raised; it is zero iff the
    lottery is ordinally efficient. ``witness`` is an optimal dominating
    lottery when the gap is positive.
    """

    holds: bool
    gap: Fraction
    witness: Optional[Lottery] = None

    def __bool__(self):
        return self.holds


def _dominance_program(sigma: Lottery, Y: Sequence[PureAssignment]):
    """Rows/columns of the program: lotteries on ``Y`` dominating ``sigma``.

    Cuts where ``sigma`` has upper probability 0 are vacuous and dropped.
    Cuts where it has probability 1 exclude every assignment placing the
    agent below the cut, and then reduce to the simplex constraint.
    """
    p = sigma.problem
    ranks = p.ranks
    k = len(p.universe)
    cuts = []
    banned = set()
    for a in range(p.n_agents):
        prof = upper_cdf_profile(marginal(sigma, a))
        for i, h in enumerate(prof[:-1], start=1):
            if h == 1:
                banned.add((a, i))
            elif h > 0:
                cuts.append((a, i, h))
    cols = [y for y in Y
            if not any(ranks(y.rows[a], a) > i for a, i in banned)]
    rows: dict[tuple[int, ...], Fraction] = {}
    for a, i, h in cuts:
        pattern = tuple(1 if ranks(y.rows[a], a) <= i else 0 for y in cols)
        rows[pattern] = max(h, rows.get(pattern, Fraction(0)))
    return cols, rows, k


def is_oe(sigma: Lottery, Y: Optional[Sequence[PureAssignment]] = None) -> OECheck:
    """Search for a lottery on ``Y`` that ordinally dominates ``sigma``.

    Summed over agents and cut points, upper cumulative probabilities equal
    ``|A| (|U| + 1) - R``, so maximizing their gain over ``sigma`` under
    weak dominance at every cut is the same as minimizing the expected rank
    total ``R``. Any positive gain means strict dominance for some agent.
    Everything is solved exactly; the returned witness is re-verified.
    """
    p = sigma.problem
    Y = _space(p, Y)
    cols, rows, _ = _dominance_program(sigma, Y)
    scale = math.lcm(*(h.denominator for h in rows.values()), 1)
    A = [list(pattern) for pattern in rows]
    b = [int(h * scale) for h in rows.values()]
    senses = [">="] * len(A)
    A.append([1] * len(cols))
    b.append(scale)
    senses.append("==")
    ranks = p.ranks
    c = [-ranks.total(y) for y in cols]
    sol = maximize(c, A, b, senses)
    best_rank = -sol.value / scale
    gap = rank_value(sigma) - best_rank
    if gap == 0:
        return OECheck(True, Fraction(0))
    weights = {y: x / scale for y, x in zip(cols, sol.x) if x}
    witness = Lottery.from_mapping(p, weights)
    _verify_dominator(sigma, witness)
    return OECheck(False, gap, witness)


def _verify_dominator(sigma: Lottery, witness: Lottery) -> None:
    p = sigma.problem
    strict = False
    for a in range(p.n_agents):
        v = fosd(p.ranking(a), marginal(sigma, a), marginal(witness, a))
        if v is Dominance.INCOMPARABLE:
            raise AssertionError(f"witness fails to dominate for agent {p.agents[a]}")
        strict = strict or v is Dominance.DOMINATED_STRICT
    if not strict:
        raise AssertionError("witness does not strictly dominate any agent")


@dataclass(frozen=True)
class RESolution:
    value: int
    optimal: tuple[PureAssignment, ...]
    method: str


def solve_re(p: Problem, Y: Optional[Sequence[PureAssignment]] = None, fast: bool = True) -> RESolution:
    """Minimum expected rank total and the assignments attaining it.

    The exhaustive path returns every minimizer in enumeration order. For
    unit demand with simple capacities (and ``fast``), a min-cost
    assignment over expanded object copies returns a single minimizer.
    """
    if fast and Y is None and isinstance(p.feasible, UnitDemandSimpleCapacity):
        y = _re_matching(p)
        return RESolution(p.ranks.total(y), (y,), "matching")
    Y = _space(p, Y)
    totals = [p.ranks.total(y) for y in Y]
    best = min(totals)
    return RESolution(best, tuple(y for y, t in zip(Y, totals) if t == best), "exhaustive")


def _re_matching(p: Problem) -> PureAssignment:
    F = p.feasible
    n, m = p.n_agents, p.n_objects
    slots: list[tuple[int, ...]] = []
    for o, q in enumerate(F.capacity):
        unit = tuple(1 if i == o else 0 for i in range(m))
        slots.extend([unit] * min(q, n))
    if F.allow_empty:
        slots.extend([(0,) * m] * n)
    if len(slots) < n:
        raise ValueError("not enough object copies for unit demand")
    cost = np.array([[p.ranks(x, a) for x in slots] for a in range(n)], dtype=np.int64)
    agents, chosen = linear_sum_assignment(cost)
    rows = [None] * n
    for a, s in zip(agents, chosen):
        rows[a] = slots[s]
    return PureAssignment(tuple(rows))


def is_re(sigma: Lottery, optimum: Optional[int] = None, Y: Optional[Sequence[PureAssignment]] = None) -> bool:
    if optimum is None:
        optimum = solve_re(sigma.problem, Y).value
    return rank_value(sigma) == optimum


@dataclass(frozen=True)
class EfficiencyReport:
    ee: bool
    oe: bool
    re: bool
    rank_value: Fraction
    optimal_rank_value: int
    oe_gap: Fraction = Fraction(0)
    ee_witness: Optional[tuple[PureAssignment, PureAssignment]] = None
    oe_witness: Optional[Lottery] = None
    re_witness: Optional[PureAssignment] = None

    def __post_init__(self):
        if self.re and not self.oe:
            raise AssertionError("rank-minimizing lottery reported as not ordinally efficient")
        if self.oe and not self.ee:
            raise AssertionError("ordinally efficient lottery reported as not ex-post efficient")


def efficiency_report(sigma: Lottery, Y: Optional[Sequence[PureAssignment]] = None) -> EfficiencyReport:
    p = sigma.problem
    Y = _space(p, Y)
    ee = is_ee(sigma, Y)
    oe = is_oe(sigma, Y)
    re_sol = solve_re(p, Y)
    R = rank_value(sigma)
    return EfficiencyReport(
        ee=ee.holds,
        oe=oe.holds,
        re=R == re_sol.value,
        rank_value=R,
        optimal_rank_value=re_sol.value,
        oe_gap=oe.gap,
        ee_witness=None if ee else (ee.inefficient, ee.dominator),
        oe_witness=oe.witness,
        re_witness=None if R == re_sol.value else re_sol.optimal[0],
    )
