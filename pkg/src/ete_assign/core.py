"""Problem instances: agents, object types, bundles, strict preferences, equals."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional, Sequence

from .feasibility import (
    Bundle,
    ExplicitSet,
    FeasibleSet,
    LinearCaps,
    PureAssignment,
    UnitDemandSimpleCapacity,
    is_feasible,
)

Ranking = tuple[int, ...]  # universe indices, best first
Partition = tuple[tuple[int, ...], ...]


class ProblemError(ValueError):
    """A problem instance is malformed."""


def partition_by_preference(preferences: Sequence[Sequence[int]]) -> Partition:
    """Group agents with identical orders; groups ordered by first member."""
    groups: dict[tuple[int, ...], list[int]] = {}
    for a, order in enumerate(preferences):
        groups.setdefault(tuple(order), []).append(a)
    return tuple(tuple(g) for g in groups.values())


def _unit(o: int, n: int) -> Bundle:
    return tuple(1 if i == o else 0 for i in range(n))


@dataclass(frozen=True, eq=False)
class Problem:
    agents: tuple[str, ...]
    objects: tuple[str, ...]
    universe: tuple[Bundle, ...]
    preferences: tuple[Ranking, ...]
    partition: Partition
    feasible: FeasibleSet
    # scratch space for derived results (audits, closure checks)
    memo: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        set_ = object.__setattr__
        set_(self, "agents", tuple(self.agents))
        set_(self, "objects", tuple(self.objects))
        set_(self, "universe", tuple(tuple(int(v) for v in x) for x in self.universe))
        set_(self, "preferences", tuple(tuple(int(i) for i in r) for r in self.preferences))
        set_(self, "partition", tuple(tuple(int(a) for a in g) for g in self.partition))
        self._validate()

    def _validate(self):
        n, m = len(self.agents), len(self.objects)
        if n == 0 or m == 0:
            raise ProblemError("need at least one agent and one object type")
        if len(set(self.agents)) != n:
            raise ProblemError("agent labels must be unique")
        if len(set(self.objects)) != m:
            raise ProblemError("object labels must be unique")
        if not self.universe:
            raise ProblemError("bundle universe is empty")
        for x in self.universe:
            if len(x) != m or any(v < 0 for v in x):
                raise ProblemError(f"bundle {x} is not a non-negative vector of length {m}")
        if len(set(self.universe)) != len(self.universe):
            raise ProblemError("bundle universe contains duplicates")
        if len(self.preferences) != n:
            raise ProblemError(f"expected {n} preference orders, got {len(self.preferences)}")
        k = len(self.universe)
        for a, order in enumerate(self.preferences):
            if sorted(order) != list(range(k)):
                raise ProblemError(
                    f"preference of {self.agents[a]} must rank each of the {k} bundles "
                    "exactly once (strict, complete order)")
        seen = [a for g in self.partition for a in g]
        if any(len(g) == 0 for g in self.partition):
            raise ProblemError("partition has an empty group")
        if sorted(seen) != list(range(n)):
            raise ProblemError("partition must cover every agent exactly once")
        self._validate_feasible()

    def _validate_feasible(self):
        F, n, m = self.feasible, self.n_agents, self.n_objects
        universe = set(self.universe)
        zero = (0,) * m
        if isinstance(F, ExplicitSet):
            if F.shape != (n, m):
                raise ProblemError(f"feasible matrices are {F.shape}, problem is {(n, m)}")
            rows = {r for y in F.members for r in y.rows}
            if rows != universe:
                extra = sorted(rows - universe)
                missing = sorted(universe - rows)
                raise ProblemError(
                    "bundle universe must equal the rows of the explicit feasible set"
                    f" (rows outside universe: {extra}; never-feasible bundles: {missing})")
        elif isinstance(F, UnitDemandSimpleCapacity):
            if len(F.capacity) != m:
                raise ProblemError("capacity vector length differs from object count")
            expected = {_unit(o, m) for o in range(m)}
            if F.allow_empty:
                expected.add(zero)
            if universe != expected:
                raise ProblemError("unit-demand universe must be exactly the single-object bundles"
                                   + (" plus the zero bundle" if F.allow_empty else ""))
            if sum(F.capacity) < n and not F.allow_empty:
                raise ProblemError("total capacity is below the number of agents; Y is empty")
        elif isinstance(F, LinearCaps):
            for cap in F.caps:
                for a, o in cap.weights:
                    if not (0 <= a < n and 0 <= o < m):
                        raise ProblemError(f"cap references cell {(a, o)} outside {(n, m)}")
            if not F.unit_demand and zero not in universe:
                raise ProblemError("linear caps admit the all-zero row, so the zero bundle "
                                   "must appear in the universe and in every ranking")
        else:
            raise ProblemError(f"unknown feasible set type {type(F).__name__}")

    @classmethod
    def build(
        cls,
        agents: Iterable[str],
        objects: Iterable[str],
        universe: Iterable[Sequence[int]],
        preferences: Sequence[Sequence[int]],
        feasible: FeasibleSet,
        partition: Optional[Sequence[Sequence[int]]] = None,
    ) -> Problem:
        """Construct a problem; ``partition=None`` groups agents by preference."""
        if partition is None:
            partition = partition_by_preference(preferences)
        return cls(tuple(agents), tuple(objects), tuple(tuple(x) for x in universe),
                   tuple(tuple(r) for r in preferences), tuple(tuple(g) for g in partition),
                   feasible)

    @property
    def n_agents(self) -> int:
        return len(self.agents)

    @property
    def n_objects(self) -> int:
        return len(self.objects)

    @cached_property
    def bundle_index(self) -> dict[Bundle, int]:
        return {x: i for i, x in enumerate(self.universe)}

    @cached_property
    def group_of(self) -> tuple[int, ...]:
        out = [0] * self.n_agents
        for g, members in enumerate(self.partition):
            for a in members:
                out[a] = g
        return tuple(out)

    @cached_property
    def ranks(self) -> RankTable:
        return RankTable.from_problem(self)

    def ranking(self, agent: int) -> tuple[Bundle, ...]:
        """Bundles in ``agent``'s order, best first."""
        return tuple(self.universe[i] for i in self.preferences[agent])

    def agent_index(self, label: str) -> int:
        try:
            return self.agents.index(label)
        except ValueError:
            raise ProblemError(f"unknown agent {label!r}") from None

    def object_index(self, label: str) -> int:
        try:
            return self.objects.index(label)
        except ValueError:
            raise ProblemError(f"unknown object {label!r}") from None

    def equals(self, a: int, b: int) -> bool:
        return self.group_of[a] == self.group_of[b]


@dataclass(frozen=True)
class RankTable:
    """``rank[a][x]`` is one plus the number of bundles ``a`` strictly prefers to ``x``."""

    rank: tuple[dict[Bundle, int], ...]

    @classmethod
    def from_problem(cls, p: Problem) -> RankTable:
        return cls(tuple(
            {p.universe[i]: pos + 1 for pos, i in enumerate(order)} for order in p.preferences
        ))

    def __call__(self, x: Bundle, agent: int) -> int:
        return self.rank[agent][x]

    def total(self, y: PureAssignment) -> int:
        return sum(self.rank[a][r] for a, r in enumerate(y.rows))


def bundle_universe(p: Problem) -> tuple[tuple[tuple[Bundle, ...], ...], RankTable]:
    """Per-agent bundle sequences (best first) and the matching rank index."""
    return tuple(p.ranking(a) for a in range(p.n_agents)), p.ranks


@dataclass(frozen=True)
class AuditReport:
    name: str
    passed: bool
    message: str = ""
    witness: Optional[tuple] = None
    structural: bool = False

    def __bool__(self):
        return self.passed


def audit_assumption1(p: Problem) -> AuditReport:
    """Equals must share one preference order."""
    for g, members in enumerate(p.partition):
        first = members[0]
        for b in members[1:]:
            if p.preferences[b] != p.preferences[first]:
                return AuditReport(
                    "assumption1", False,
                    f"equals {p.agents[first]} and {p.agents[b]} (group {g}) rank bundles "
                    "differently",
                    witness=(g, first, b))
    return AuditReport("assumption1", True, "equals share preference orders")


def _cap_row(cap, agent: int, n_objects: int) -> tuple:
    return tuple(cap.weights.get((agent, o), 0) for o in range(n_objects))


def audit_assumption2(p: Problem) -> AuditReport:
    """Swapping the rows of two equals must preserve feasibility.

    Explicit sets are checked member by member. Linear caps pass
    structurally when every cap treats equals' rows identically; that is
    sufficient, not necessary. Unit demand with simple capacity treats all
    agents alike and always passes.
    """
    F = p.feasible
    if isinstance(F, UnitDemandSimpleCapacity):
        return AuditReport("assumption2", True, "structural pass: capacities are anonymous",
                           structural=True)
    if isinstance(F, LinearCaps):
        for members in p.partition:
            first = members[0]
            for b in members[1:]:
                for cap in F.caps:
                    if _cap_row(cap, first, p.n_objects) != _cap_row(cap, b, p.n_objects):
                        return AuditReport(
                            "assumption2", False,
                            f"cap {cap.label!r} weighs equals {p.agents[first]} and "
                            f"{p.agents[b]} differently (structural check)",
                            witness=(cap.label, first, b), structural=True)
        return AuditReport("assumption2", True,
                           "structural pass: caps weigh equals identically", structural=True)
    for y in F.sorted_members():
        for members in p.partition:
            for i, a in enumerate(members):
                for b in members[i + 1:]:
                    if y.rows[a] == y.rows[b]:
                        continue
                    if not is_feasible(F, y.swapped(a, b)):
                        return AuditReport(
                            "assumption2", False,
                            f"swapping equals {p.agents[a]} and {p.agents[b]} leaves Y",
                            witness=(y, a, b))
    return AuditReport("assumption2", True, "Y is closed under swaps of equals")


def require_assumptions(p: Problem) -> None:
    """Raise :class:`AssumptionViolation` unless both audits pass (cached)."""
    if "assumptions" not in p.memo:
        p.memo["assumptions"] = (audit_assumption1(p), audit_assumption2(p))
    for report in p.memo["assumptions"]:
        if not report:
            raise AssumptionViolation(report)


class AssumptionViolation(ValueError):
    def __init__(self, report: AuditReport):
        super().__init__(f"{report.name} failed: {report.message}")
        self.report = report
