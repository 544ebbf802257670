"""Feasible sets of pure assignments and structural checks on them.

Three representations are supported:

* :class:`ExplicitSet` -- a finite list of matrices; the ground truth every
  brute-force oracle works against.
* :class:`LinearCaps` -- non-negative linear upper bounds (regional caps,
  budgets, reserved slots), optionally with unit demand.
* :class:`UnitDemandSimpleCapacity` -- one object per agent, at most ``q_o``
  copies of each object.

Constraint families lower to :class:`ExplicitSet` through
:func:`enumerate_assignments` under a budget.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import TYPE_CHECKING, Iterable, Mapping, Optional, Sequence, Union

if TYPE_CHECKING:
    from .core import Problem

Bundle = tuple[int, ...]

DEFAULT_LIMIT = 100_000
DEFAULT_MAX_TESTED = 1_000_000


class EnumerationBudgetExceeded(RuntimeError):
    """Raised when an exhaustive enumeration would exceed its budget."""

    def __init__(self, limit: int, what: str = "feasible assignments"):
        super().__init__(f"enumeration budget exceeded: more than {limit} {what}")
        self.limit = limit


@dataclass(frozen=True, order=True)
class PureAssignment:
    """An agents-by-objects matrix of non-negative integer copy counts."""

    rows: tuple[Bundle, ...]

    def __post_init__(self):
        if not self.rows:
            raise ValueError("a pure assignment needs at least one agent")
        width = len(self.rows[0])
        for r in self.rows:
            if len(r) != width:
                raise ValueError("pure assignment rows must have equal length")
            if any((not isinstance(v, int)) or v < 0 for v in r):
                raise ValueError(f"entries must be non-negative integers, got row {r}")

    @classmethod
    def from_matrix(cls, matrix: Iterable[Iterable[int]]) -> PureAssignment:
        return cls(tuple(tuple(int(v) for v in row) for row in matrix))

    @classmethod
    def zeros(cls, n_agents: int, n_objects: int) -> PureAssignment:
        return cls(tuple((0,) * n_objects for _ in range(n_agents)))

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), len(self.rows[0])

    def row(self, agent: int) -> Bundle:
        return self.rows[agent]

    def column(self, obj: int) -> tuple[int, ...]:
        return tuple(r[obj] for r in self.rows)

    def with_rows(self, changes: Mapping[int, Bundle]) -> PureAssignment:
        return PureAssignment(tuple(changes.get(a, r) for a, r in enumerate(self.rows)))

    def permuted(self, perm: Sequence[int]) -> PureAssignment:
        """Row ``a`` of ``self`` becomes row ``perm[a]`` of the result."""
        out: list[Bundle] = [()] * len(self.rows)
        for a, r in enumerate(self.rows):
            out[perm[a]] = r
        return PureAssignment(tuple(out))

    def swapped(self, a: int, b: int) -> PureAssignment:
        rows = list(self.rows)
        rows[a], rows[b] = rows[b], rows[a]
        return PureAssignment(tuple(rows))

    def to_list(self) -> list[list[int]]:
        return [list(r) for r in self.rows]


class _Ineligible(enum.Enum):
    INELIGIBLE = "INELIGIBLE"

    def __repr__(self):
        return "INELIGIBLE"


#: Cap weight forcing the cell to zero (stands in for an infinite coefficient).
INELIGIBLE = _Ineligible.INELIGIBLE

Weight = Union[Fraction, _Ineligible]


@dataclass(frozen=True)
class Cap:
    """``sum_{(a,o)} weights[a,o] * y[a][o] <= bound``; missing cells weigh zero."""

    weights: Mapping[tuple[int, int], Weight]
    bound: Fraction
    label: str = ""

    def __post_init__(self):
        clean: dict[tuple[int, int], Weight] = {}
        for cell, w in self.weights.items():
            if w is not INELIGIBLE:
                w = Fraction(w)
                if w < 0:
                    raise ValueError(f"cap weight for cell {cell} is negative")
                if w == 0:
                    continue
            clean[(int(cell[0]), int(cell[1]))] = w
        bound = Fraction(self.bound)
        if bound < 0:
            raise ValueError("cap bound must be non-negative")
        object.__setattr__(self, "weights", clean)
        object.__setattr__(self, "bound", bound)

    def ineligible_cells(self) -> set[tuple[int, int]]:
        return {c for c, w in self.weights.items() if w is INELIGIBLE}

    def load(self, y: PureAssignment) -> Fraction:
        return sum(
            (w * y.rows[a][o] for (a, o), w in self.weights.items() if w is not INELIGIBLE),
            Fraction(0),
        )

    def admits(self, y: PureAssignment) -> bool:
        if any(y.rows[a][o] > 0 for a, o in self.ineligible_cells()):
            return False
        return self.load(y) <= self.bound


@dataclass(frozen=True)
class ExplicitSet:
    members: frozenset[PureAssignment]

    def __post_init__(self):
        members = frozenset(self.members)
        if not members:
            raise ValueError("an explicit feasible set must be non-empty")
        shapes = {y.shape for y in members}
        if len(shapes) != 1:
            raise ValueError(f"explicit feasible set mixes matrix shapes {sorted(shapes)}")
        object.__setattr__(self, "members", members)

    @classmethod
    def of(cls, assignments: Iterable) -> ExplicitSet:
        return cls(frozenset(
            y if isinstance(y, PureAssignment) else PureAssignment.from_matrix(y)
            for y in assignments
        ))

    @property
    def shape(self) -> tuple[int, int]:
        return next(iter(self.members)).shape

    def sorted_members(self) -> list[PureAssignment]:
        return sorted(self.members)


@dataclass(frozen=True)
class LinearCaps:
    caps: tuple[Cap, ...]
    unit_demand: bool = False

    def __post_init__(self):
        object.__setattr__(self, "caps", tuple(self.caps))


@dataclass(frozen=True)
class UnitDemandSimpleCapacity:
    """Each agent receives one object; object ``o`` has ``capacity[o]`` copies.

    With ``allow_empty`` an agent may also receive nothing, which makes the
    set downward closed.
    """

    capacity: tuple[int, ...]
    allow_empty: bool = False

    def __post_init__(self):
        cap = tuple(int(q) for q in self.capacity)
        if not cap or any(q < 1 for q in cap):
            raise ValueError("capacities must be positive integers")
        object.__setattr__(self, "capacity", cap)


FeasibleSet = Union[ExplicitSet, LinearCaps, UnitDemandSimpleCapacity]


def _check_cells(F: LinearCaps, shape: tuple[int, int]) -> None:
    n_agents, n_objects = shape
    for cap in F.caps:
        for a, o in cap.weights:
            if not (0 <= a < n_agents and 0 <= o < n_objects):
                raise ValueError(f"cap {cap.label or ''} references cell {(a, o)} outside {shape}")


def is_feasible(F: FeasibleSet, y: PureAssignment) -> bool:
    """Membership test; raises ``ValueError`` on a dimension mismatch."""
    if isinstance(F, ExplicitSet):
        if y.shape != F.shape:
            raise ValueError(f"assignment shape {y.shape} != feasible set shape {F.shape}")
        return y in F.members
    if isinstance(F, UnitDemandSimpleCapacity):
        if y.shape[1] != len(F.capacity):
            raise ValueError(f"assignment has {y.shape[1]} objects, capacity has {len(F.capacity)}")
        for r in y.rows:
            s = sum(r)
            if s > 1 or (s == 0 and not F.allow_empty):
                return False
        return all(sum(col) <= q for col, q in zip(zip(*y.rows), F.capacity))
    if isinstance(F, LinearCaps):
        _check_cells(F, y.shape)
        if F.unit_demand and any(sum(r) != 1 for r in y.rows):
            return False
        return all(cap.admits(y) for cap in F.caps)
    raise TypeError(f"unknown feasible set type {type(F).__name__}")


def is_downward_closed_family(F: FeasibleSet) -> bool:
    """True when ``F`` is downward closed by construction (no enumeration)."""
    if isinstance(F, LinearCaps):
        return not F.unit_demand
    if isinstance(F, UnitDemandSimpleCapacity):
        return F.allow_empty
    return False


def _row_options(F: FeasibleSet, p: Problem, agent: int) -> list[Bundle]:
    opts = []
    for x in sorted(p.universe):
        if isinstance(F, UnitDemandSimpleCapacity):
            s = sum(x)
            if s > 1 or (s == 0 and not F.allow_empty):
                continue
        elif isinstance(F, LinearCaps):
            if F.unit_demand and sum(x) != 1:
                continue
            if any(x[o] > 0 for cap in F.caps for a, o in cap.ineligible_cells() if a == agent):
                continue
        opts.append(x)
    return opts


def _load_vectors(F: FeasibleSet, agent: int, options: list[Bundle]):
    """Per-option load on each upper bound, plus the bounds themselves."""
    if isinstance(F, UnitDemandSimpleCapacity):
        bounds = [Fraction(q) for q in F.capacity]
        return [[Fraction(v) for v in x] for x in options], bounds
    bounds = [cap.bound for cap in F.caps]
    loads = []
    for x in options:
        loads.append([
            sum((w * x[o] for (a, o), w in cap.weights.items()
                 if a == agent and w is not INELIGIBLE), Fraction(0))
            for cap in F.caps
        ])
    return loads, bounds


def enumerate_assignments(
    F: FeasibleSet,
    p: Problem,
    limit: int = DEFAULT_LIMIT,
    max_tested: int = DEFAULT_MAX_TESTED,
) -> list[PureAssignment]:
    """All feasible pure assignments whose rows lie in the bundle universe.

    Output is sorted lexicographically over matrix cells (row-major), so it
    is reproducible. Raises :class:`EnumerationBudgetExceeded` when more than
    ``limit`` members exist or more than ``max_tested`` partial matrices are
    examined.
    """
    if isinstance(F, ExplicitSet):
        if len(F.members) > limit:
            raise EnumerationBudgetExceeded(limit)
        return F.sorted_members()
    if isinstance(F, LinearCaps):
        _check_cells(F, (p.n_agents, p.n_objects))

    n = p.n_agents
    options = [_row_options(F, p, a) for a in range(n)]
    tables = [_load_vectors(F, a, options[a]) for a in range(n)]
    bounds = tables[0][1] if tables else []
    out: list[PureAssignment] = []
    tested = 0
    rows: list[Bundle] = []

    def descend(a: int, load: list[Fraction]) -> None:
        nonlocal tested
        if a == n:
            out.append(PureAssignment(tuple(rows)))
            if len(out) > limit:
                raise EnumerationBudgetExceeded(limit)
            return
        loads = tables[a][0]
        for x, extra in zip(options[a], loads):
            tested += 1
            if tested > max_tested:
                raise EnumerationBudgetExceeded(max_tested, "candidate matrices tested")
            new = [u + v for u, v in zip(load, extra)]
            # weights are non-negative, so an overloaded prefix stays overloaded
            if any(u > b for u, b in zip(new, bounds)):
                continue
            rows.append(x)
            descend(a + 1, new)
            rows.pop()

    descend(0, [Fraction(0)] * len(bounds))
    return out


def extendable(F: FeasibleSet, p: Problem, assigned: Mapping[int, Bundle]) -> bool:
    """Can the partial assignment ``assigned`` be completed inside ``F``?

    For downward-closed sets this is feasibility with every unassigned agent
    at the zero bundle. For strict unit demand with simple capacities, any
    capacity-respecting prefix completes as long as enough copies remain.
    """
    if isinstance(F, UnitDemandSimpleCapacity) and not F.allow_empty:
        used = [0] * len(F.capacity)
        for x in assigned.values():
            if sum(x) != 1:
                return False
            used = [u + v for u, v in zip(used, x)]
        if any(u > q for u, q in zip(used, F.capacity)):
            return False
        spare = sum(q - u for u, q in zip(used, F.capacity))
        return spare >= p.n_agents - len(assigned)
    zero = (0,) * p.n_objects
    y = PureAssignment(tuple(assigned.get(a, zero) for a in range(p.n_agents)))
    return is_feasible(F, y)


@dataclass(frozen=True)
class ClosureCheck:
    """Outcome of a downward-closure test; truthy iff the property holds."""

    holds: bool
    witness: Optional[tuple[PureAssignment, PureAssignment]] = None
    structural: bool = False

    def __bool__(self):
        return self.holds


def _decrements(y: PureAssignment):
    for a, r in enumerate(y.rows):
        for o, v in enumerate(r):
            if v > 0:
                lowered = r[:o] + (v - 1,) + r[o + 1:]
                yield y.with_rows({a: lowered})


def check_general_upper_bounds(
    F: FeasibleSet, p: Problem, limit: int = DEFAULT_LIMIT
) -> ClosureCheck:
    """Is ``Y`` closed under componentwise decrease?

    Linear caps without unit demand are closed by construction. Otherwise
    ``Y`` is enumerated and every single-unit decrement of every member is
    looked up; single steps suffice by induction. The witness is a member
    together with a decrement that falls outside ``Y``.
    """
    if is_downward_closed_family(F):
        return ClosureCheck(True, structural=True)
    members = enumerate_assignments(F, p, limit=limit)
    pool = set(members)
    for y in members:
        for z in _decrements(y):
            if z not in pool:
                return ClosureCheck(False, (y, z))
    return ClosureCheck(True)


@dataclass(frozen=True)
class PerObjectCheck:
    """Per-object upper bounds, read two ways.

    ``columns_closed``: every column set ``Z_o`` is downward closed.
    ``separable``: ``Y`` is exactly the set of matrices whose columns come
    from the ``Z_o`` (columns combine freely). ``holds`` requires both.
    """

    holds: bool
    columns_closed: bool
    separable: bool
    witness: Optional[tuple[int, tuple[int, ...]]] = None

    def __bool__(self):
        return self.holds


def column_sets(members: Iterable[PureAssignment], n_objects: int) -> list[set[tuple[int, ...]]]:
    Z: list[set[tuple[int, ...]]] = [set() for _ in range(n_objects)]
    for y in members:
        for o in range(n_objects):
            Z[o].add(y.column(o))
    return Z


def check_per_object_upper_bounds(
    F: FeasibleSet, p: Problem, limit: int = DEFAULT_LIMIT
) -> PerObjectCheck:
    members = enumerate_assignments(F, p, limit=limit)
    Z = column_sets(members, p.n_objects)
    witness = None
    for o, cols in enumerate(Z):
        for z in sorted(cols):
            for i, v in enumerate(z):
                if v > 0 and z[:i] + (v - 1,) + z[i + 1:] not in cols:
                    witness = (o, z)
                    break
            if witness:
                break
        if witness:
            break
    columns_closed = witness is None
    separable = len(members) == math.prod(len(c) for c in Z)
    return PerObjectCheck(columns_closed and separable, columns_closed, separable, witness)


def transform_min_quota(
    F: LinearCaps,
    region: Iterable[int],
    n: int,
    null_object: int,
    *,
    n_agents: int,
    n_objects: int,
) -> LinearCaps:
    """Rewrite "at least ``n`` agents inside ``region``" as an upper bound.

    Under unit demand with a null object every agent holds exactly one
    object, so at least ``n`` inside the region is the same as at most
    ``n_agents - n`` outside it.
    """
    if not isinstance(F, LinearCaps) or not F.unit_demand:
        raise ValueError("minimum-quota rewrite requires unit demand")
    region = frozenset(region)
    if not 0 <= null_object < n_objects:
        raise ValueError("minimum-quota rewrite requires a declared null object")
    if null_object in region:
        raise ValueError("the null object cannot belong to the quota region")
    if not 0 <= n <= n_agents:
        raise ValueError(f"quota {n} outside [0, {n_agents}]")
    weights = {(a, o): Fraction(1) for a in range(n_agents) for o in range(n_objects)
               if o not in region}
    quota = Cap(weights, Fraction(n_agents - n), label=f"min-quota {sorted(region)} >= {n}")
    return LinearCaps(F.caps + (quota,), unit_demand=True)
