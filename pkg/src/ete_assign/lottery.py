"""Exact lotteries over pure assignments, marginals, and stochastic dominance."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence, Union

from .core import Problem
from .feasibility import Bundle, PureAssignment, is_feasible

Prob = Union[Fraction, int, str]


class LotteryError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Lottery:
    """A finitely supported distribution over feasible pure assignments.

    ``weights`` is kept sorted by assignment so iteration order, printing and
    serialization are deterministic.
    """

    problem: Problem
    weights: tuple[tuple[PureAssignment, Fraction], ...]

    @classmethod
    def from_mapping(
        cls,
        problem: Problem,
        mapping: Union[Mapping[PureAssignment, Prob], Iterable[tuple[PureAssignment, Prob]]],
        check: bool = True,
    ) -> Lottery:
        items = mapping.items() if isinstance(mapping, Mapping) else mapping
        acc: dict[PureAssignment, Fraction] = {}
        for y, pr in items:
            if not isinstance(y, PureAssignment):
                y = PureAssignment.from_matrix(y)
            pr = Fraction(pr)
            if pr < 0:
                raise LotteryError(f"negative probability {pr}")
            if pr:
                acc[y] = acc.get(y, Fraction(0)) + pr
        if sum(acc.values()) != 1:
            raise LotteryError(f"probabilities sum to {sum(acc.values())}, not 1")
        if check:
            for y in acc:
                if y.shape != (problem.n_agents, problem.n_objects):
                    raise LotteryError(f"assignment shape {y.shape} does not match the problem")
                if not is_feasible(problem.feasible, y):
                    raise LotteryError(f"support member {y.to_list()} is not feasible")
        return cls(problem, tuple(sorted(acc.items())))

    @classmethod
    def point_mass(cls, problem: Problem, y: PureAssignment, check: bool = True) -> Lottery:
        return cls.from_mapping(problem, {y: Fraction(1)}, check=check)

    @property
    def support(self) -> tuple[PureAssignment, ...]:
        return tuple(y for y, _ in self.weights)

    def prob(self, y: PureAssignment) -> Fraction:
        for z, pr in self.weights:
            if z == y:
                return pr
        return Fraction(0)

    def as_dict(self) -> dict[PureAssignment, Fraction]:
        return dict(self.weights)

    def is_pure(self) -> bool:
        return len(self.weights) == 1

    def __len__(self):
        return len(self.weights)

    def __eq__(self, other):
        if not isinstance(other, Lottery):
            return NotImplemented
        return self.problem is other.problem and self.weights == other.weights

    __hash__ = None


@dataclass(frozen=True)
class Marginal:
    """Distribution of one agent's bundle; ``ranking`` is that agent's order."""

    agent: int
    dist: Mapping[Bundle, Fraction]
    ranking: tuple[Bundle, ...]

    def prob(self, x: Bundle) -> Fraction:
        return self.dist.get(x, Fraction(0))

    def same_distribution(self, other: Marginal) -> bool:
        return dict(self.dist) == dict(other.dist)


def marginal(sigma: Lottery, agent: int) -> Marginal:
    dist: dict[Bundle, Fraction] = {}
    for y, pr in sigma.weights:
        x = y.rows[agent]
        dist[x] = dist.get(x, Fraction(0)) + pr
    return Marginal(agent, dist, sigma.problem.ranking(agent))


def marginals(sigma: Lottery) -> list[Marginal]:
    return [marginal(sigma, a) for a in range(sigma.problem.n_agents)]


def upper_cdf(m: Marginal, x: Bundle, ranking: Optional[Sequence[Bundle]] = None) -> Fraction:
    """Probability of a bundle at least as good as ``x`` under ``ranking``."""
    ranking = m.ranking if ranking is None else ranking
    total = Fraction(0)
    for z in ranking:
        total += m.prob(z)
        if z == x:
            return total
    raise KeyError(f"bundle {x} is not in the ranking")


def upper_cdf_profile(m: Marginal, ranking: Optional[Sequence[Bundle]] = None) -> list[Fraction]:
    """Upper cumulative probabilities at every cut point, best bundle first."""
    ranking = m.ranking if ranking is None else ranking
    out, total = [], Fraction(0)
    for z in ranking:
        total += m.prob(z)
        out.append(total)
    return out


class Dominance(enum.Enum):
    """How the first marginal compares to the second (is it dominated?)."""

    DOMINATED_WEAK = "dominated_weak"
    DOMINATED_STRICT = "dominated_strict"
    EQUAL = "equal"
    INCOMPARABLE = "incomparable"

    @property
    def weakly_dominated(self) -> bool:
        return self is not Dominance.INCOMPARABLE


def fosd(ranking: Sequence[Bundle], m: Marginal, m2: Marginal) -> Dominance:
    """Is ``m`` first-order stochastically dominated by ``m2`` under ``ranking``?

    Both marginals must put all their mass on bundles of ``ranking``; then
    the upper cumulative profile determines the distribution, so weak
    dominance with differing distributions is always strict and
    ``DOMINATED_WEAK`` cannot arise. A reverse dominance is reported as
    ``INCOMPARABLE``; swap the arguments to detect it.
    """
    ranked = set(ranking)
    for mm in (m, m2):
        stray = [x for x, pr in mm.dist.items() if pr and x not in ranked]
        if stray:
            raise ValueError(f"marginal puts mass on unranked bundles {stray}")
    lo = upper_cdf_profile(m, ranking)
    hi = upper_cdf_profile(m2, ranking)
    if lo == hi:
        return Dominance.EQUAL
    if all(h >= l for h, l in zip(hi, lo)):
        return Dominance.DOMINATED_STRICT
    return Dominance.INCOMPARABLE
