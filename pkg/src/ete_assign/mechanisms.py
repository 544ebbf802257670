"""Serial dictatorship under upper-bound constraints and the ETE pipeline."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .core import Partition, Problem, require_assumptions
from .ete import Mode, ete_reassign
from .feasibility import (
    ExplicitSet,
    LinearCaps,
    PureAssignment,
    UnitDemandSimpleCapacity,
    check_general_upper_bounds,
    extendable,
    is_downward_closed_family,
    is_feasible,
)
from .lottery import Lottery


class InfeasibleStart(ValueError):
    """The all-zero assignment is not feasible."""


class NotDownwardClosed(ValueError):
    """Serial dictatorship needs general upper bounds to certify prefixes."""


class NotConsecutiveEquals(ValueError):
    pass


@dataclass(frozen=True)
class PriorityList:
    order: tuple[int, ...]

    def __post_init__(self):
        order = tuple(int(a) for a in self.order)
        if sorted(order) != list(range(len(order))):
            raise ValueError(f"priority list {order} is not a permutation of the agents")
        object.__setattr__(self, "order", order)

    def __iter__(self):
        return iter(self.order)

    def __len__(self):
        return len(self.order)

    @classmethod
    def from_labels(cls, p: Problem, labels: Iterable[str]) -> PriorityList:
        alpha = cls(tuple(p.agent_index(s) for s in labels))
        if len(alpha) != p.n_agents:
            raise ValueError("priority list must name every agent once")
        return alpha


def check_consecutive_equals(alpha: PriorityList, partition: Partition) -> bool:
    """True iff each group of equals occupies one contiguous block of ``alpha``."""
    group = {a: g for g, members in enumerate(partition) for a in members}
    finished = set()
    prev = None
    for a in alpha:
        g = group[a]
        if g != prev:
            if g in finished:
                return False
            if prev is not None:
                finished.add(prev)
            prev = g
    return True


def make_consecutive_equals(
    partition: Partition,
    group_order: Optional[Sequence[int]] = None,
    within_order: Optional[Sequence[Sequence[int]]] = None,
) -> PriorityList:
    """Concatenate the groups in ``group_order``, each listed in its own order.

    ``within_order[g]`` permutes positions inside group ``g``; by default
    groups keep their stored order.
    """
    k = len(partition)
    group_order = range(k) if group_order is None else group_order
    if sorted(group_order) != list(range(k)):
        raise ValueError("group order must permute the groups")
    out = []
    for g in group_order:
        members = partition[g]
        if within_order is not None:
            pos = within_order[g]
            if sorted(pos) != list(range(len(members))):
                raise ValueError(f"within-group order for group {g} is not a permutation")
            members = tuple(members[i] for i in pos)
        out.extend(members)
    return PriorityList(tuple(out))


def _require_upper_bounds(p: Problem) -> None:
    F = p.feasible
    if isinstance(F, UnitDemandSimpleCapacity) or is_downward_closed_family(F):
        return
    if isinstance(F, ExplicitSet):
        if "closure" not in p.memo:
            p.memo["closure"] = check_general_upper_bounds(F, p)
        if p.memo["closure"]:
            return
        y, z = p.memo["closure"].witness
        raise NotDownwardClosed(
            f"Y is not downward closed: {y.to_list()} is feasible but {z.to_list()} is not")
    if isinstance(F, LinearCaps):
        raise NotDownwardClosed("unit-demand linear caps are not downward closed")


def serial_dictatorship(p: Problem, alpha: PriorityList) -> PureAssignment:
    """Let agents pick in list order, each taking the best bundle that keeps
    the partial assignment completable.

    Strict unit demand with simple capacities is handled by its own
    completion test; every other feasible set must be downward closed.
    """
    F = p.feasible
    if len(alpha) != p.n_agents:
        raise ValueError("priority list length differs from the number of agents")
    _require_upper_bounds(p)
    if not extendable(F, p, {}):
        raise InfeasibleStart("no feasible assignment extends the empty start")
    assigned: dict[int, tuple[int, ...]] = {}
    for a in alpha:
        for x in p.ranking(a):
            trial = dict(assigned)
            trial[a] = x
            if extendable(F, p, trial):
                assigned = trial
                break
        else:
            raise InfeasibleStart(f"no bundle keeps the assignment feasible at {p.agents[a]}")
    y = PureAssignment(tuple(assigned[a] for a in range(p.n_agents)))
    assert is_feasible(F, y)
    return y


def run_pipeline(
    p: Problem,
    alpha: PriorityList,
    mode: Mode = Mode.CYCLIC,
    enforce_consecutive: bool = True,
) -> Lottery:
    """Serial dictatorship followed by the ETE reassignment.

    With a consecutive-equals list and general upper bounds the output is
    ETE and ordinally efficient. ``enforce_consecutive=False`` exists only
    for negative controls.
    """
    require_assumptions(p)
    if enforce_consecutive and not check_consecutive_equals(alpha, p.partition):
        raise NotConsecutiveEquals(
            f"priority list {[p.agents[a] for a in alpha]} splits a group of equals")
    y = serial_dictatorship(p, alpha)
    return ete_reassign(Lottery.point_mass(p, y, check=False), mode)
