"""Derived assignments, the ETE reassignment, and ETE checks."""
from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional, Sequence

from .core import Partition, require_assumptions
from .feasibility import Bundle, PureAssignment
from .lottery import Dominance, Lottery, fosd, marginal


class Mode(str, enum.Enum):
    """Which within-group bijections generate the derived set.

    ``CYCLIC`` uses independent rotations of each group (``prod |A_n|``
    bijections); ``FULL`` uses every within-group permutation
    (``prod |A_n|!``). Both give every agent the group-averaged marginal.
    """

    CYCLIC = "cyclic"
    FULL = "full"


def _group_maps(group: Sequence[int], mode: Mode) -> Iterator[dict[int, int]]:
    k = len(group)
    if mode is Mode.CYCLIC:
        for s in range(k):
            yield {group[j]: group[(j + s) % k] for j in range(k)}
    else:
        for perm in itertools.permutations(group):
            yield dict(zip(group, perm))


def bijections(partition: Partition, mode: Mode = Mode.CYCLIC) -> Iterator[tuple[int, ...]]:
    """Agent bijections that only move agents within their own group."""
    n = sum(len(g) for g in partition)
    for parts in itertools.product(*(list(_group_maps(g, mode)) for g in partition)):
        pi = [0] * n
        for part in parts:
            for a, b in part.items():
                pi[a] = b
        yield tuple(pi)


@dataclass(frozen=True)
class DerivedSet:
    """Assignments derived from ``base``, with multiplicities summing to ``size``."""

    base: PureAssignment
    members: tuple[tuple[PureAssignment, int], ...]
    mode: Mode
    size: int

    def assignments(self) -> tuple[PureAssignment, ...]:
        return tuple(y for y, _ in self.members)


def derived_set(y: PureAssignment, partition: Partition, mode: Mode = Mode.CYCLIC) -> DerivedSet:
    counts: dict[PureAssignment, int] = {}
    for pi in bijections(partition, mode):
        z = y.permuted(pi)
        counts[z] = counts.get(z, 0) + 1
    size = sum(counts.values())
    expected = (math.prod(len(g) for g in partition) if mode is Mode.CYCLIC
                else math.prod(math.factorial(len(g)) for g in partition))
    assert size == expected
    return DerivedSet(y, tuple(sorted(counts.items())), Mode(mode), size)


def ete_reassign(
    sigma: Lottery,
    mode: Mode = Mode.CYCLIC,
    partition: Optional[Partition] = None,
    check: bool = True,
) -> Lottery:
    """Spread each support member uniformly over its derived set.

    Raises :class:`~ete_assign.core.AssumptionViolation` if the problem's
    equals do not share preferences or cannot swap rows feasibly.
    """
    p = sigma.problem
    if check:
        require_assumptions(p)
    partition = p.partition if partition is None else partition
    out: dict[PureAssignment, Fraction] = {}
    for y, pr in sigma.weights:
        ds = derived_set(y, partition, mode)
        for z, mult in ds.members:
            out[z] = out.get(z, Fraction(0)) + pr * Fraction(mult, ds.size)
    # derived assignments are feasible once assumption 2 holds
    return Lottery.from_mapping(p, out, check=not check)


@dataclass(frozen=True)
class EteCheck:
    holds: bool
    witness: Optional[tuple[int, int, Bundle]] = None  # (a, b, bundle)

    def __bool__(self):
        return self.holds


def check_ete(sigma: Lottery, partition: Optional[Partition] = None) -> EteCheck:
    p = sigma.problem
    partition = p.partition if partition is None else partition
    margs = {a: marginal(sigma, a) for g in partition for a in g}
    for group in partition:
        ref = margs[group[0]]
        for b in group[1:]:
            other = margs[b]
            if not ref.same_distribution(other):
                for x in p.universe:
                    if ref.prob(x) != other.prob(x):
                        return EteCheck(False, (group[0], b, x))
    return EteCheck(True)


def lemma1_marginal(
    sigma: Lottery, agent: int, x: Bundle, partition: Optional[Partition] = None
) -> Fraction:
    """Probability that ``agent`` gets ``x`` after reassignment, without building it."""
    p = sigma.problem
    partition = p.partition if partition is None else partition
    group = next(g for g in partition if agent in g)
    return sum((marginal(sigma, b).prob(x) for b in group), Fraction(0)) / len(group)


@dataclass(frozen=True)
class PreferentialTreatment:
    """``hypothesis``: every baseline marginal is weakly dominated by every
    advantaged marginal, strictly for at least one pair. ``conclusion``:
    strictly for every pair."""

    hypothesis: bool
    conclusion: bool


def check_preferential_treatment(sigma: Lottery, advantaged: int, baseline: int) -> PreferentialTreatment:
    """Compare two groups, judging each pair under the advantaged agent's order."""
    p = sigma.problem
    adv, base = p.partition[advantaged], p.partition[baseline]
    verdicts = []
    for a in adv:
        ma = marginal(sigma, a)
        for b in base:
            verdicts.append(fosd(p.ranking(a), marginal(sigma, b), ma))
    weak = all(v in (Dominance.EQUAL, Dominance.DOMINATED_STRICT) for v in verdicts)
    strict = [v is Dominance.DOMINATED_STRICT for v in verdicts]
    return PreferentialTreatment(weak and any(strict), weak and all(strict))
