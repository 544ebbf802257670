"""JSON documents for problems, lotteries and reports.

Probabilities, cap weights and cap bounds are exact rationals written as
``"p/q"`` strings (integers are accepted as ``"3"``). Preferences list
bundle indices into ``bundleUniverse``, best first.
"""
from __future__ import annotations

import json
import re
from fractions import Fraction
from typing import Any, Optional, Union

import jsonschema

from .core import Problem, ProblemError
from .feasibility import (
    INELIGIBLE,
    Cap,
    ExplicitSet,
    LinearCaps,
    PureAssignment,
    UnitDemandSimpleCapacity,
)
from .lottery import Lottery, LotteryError, Marginal


class InputError(ValueError):
    """A document failed to parse, validate, or cross-reference."""


_RATIONAL = r"^-?[0-9]+(/[0-9]*[1-9][0-9]*)?$"

_matrix = {
    "type": "array",
    "minItems": 1,
    "items": {"type": "array", "minItems": 1, "items": {"type": "integer", "minimum": 0}},
}

PROBLEM_SCHEMA: dict = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["agents", "objects", "bundleUniverse", "preferences", "feasible"],
    "additionalProperties": False,
    "properties": {
        "agents": {"type": "array", "minItems": 1, "items": {"type": "string"}, "uniqueItems": True},
        "objects": {"type": "array", "minItems": 1, "items": {"type": "string"}, "uniqueItems": True},
        "bundleUniverse": _matrix,
        "preferences": {
            "type": "object",
            "additionalProperties": {"type": "array", "items": {"type": "integer", "minimum": 0}},
        },
        "partition": {
            "type": "array",
            "items": {"type": "array", "minItems": 1, "items": {"type": "string"}},
        },
        "byPreference": {"const": True},
        "feasible": {
            "type": "object",
            "minProperties": 1,
            "maxProperties": 1,
            "additionalProperties": False,
            "properties": {
                "explicit": {"type": "array", "minItems": 1, "items": _matrix},
                "linearCaps": {
                    "type": "object",
                    "required": ["caps"],
                    "additionalProperties": False,
                    "properties": {
                        "unitDemand": {"type": "boolean"},
                        "caps": {
                            "type": "array",
                            "items": {
                                "type": "object",
                                "required": ["weights", "bound"],
                                "additionalProperties": False,
                                "properties": {
                                    "label": {"type": "string"},
                                    "bound": {"type": "string", "pattern": _RATIONAL},
                                    "weights": {
                                        "type": "array",
                                        "items": {
                                            "type": "object",
                                            "required": ["agent", "object", "weight"],
                                            "additionalProperties": False,
                                            "properties": {
                                                "agent": {"type": "string"},
                                                "object": {"type": "string"},
                                                "weight": {
                                                    "type": "string",
                                                    "anyOf": [
                                                        {"pattern": _RATIONAL},
                                                        {"const": "INELIGIBLE"},
                                                    ],
                                                },
                                            },
                                        },
                                    },
                                },
                            },
                        },
                    },
                },
                "unitDemandSimpleCapacity": {
                    "type": "object",
                    "required": ["capacity"],
                    "additionalProperties": False,
                    "properties": {
                        "capacity": {
                            "type": "object",
                            "additionalProperties": {"type": "integer", "minimum": 1},
                        },
                        "allowEmpty": {"type": "boolean"},
                    },
                },
            },
        },
    },
    "not": {"required": ["partition", "byPreference"]},
}

LOTTERY_SCHEMA: dict = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["lottery"],
    "properties": {
        "lottery": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["assignment", "probability"],
                "additionalProperties": False,
                "properties": {
                    "assignment": {
                        "type": "array",
                        "items": {"type": "array", "items": {"type": "integer", "minimum": 0}},
                    },
                    "probability": {"type": "string", "pattern": _RATIONAL},
                },
            },
        },
    },
}


def fraction_str(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse_fraction(s: str) -> Fraction:
    if not isinstance(s, str) or not re.match(_RATIONAL, s):
        raise InputError(f"{s!r} is not an exact rational of the form p/q")
    return Fraction(s)


def _path(err: jsonschema.ValidationError) -> str:
    return "$" + "".join(f"[{p!r}]" if isinstance(p, str) else f"[{p}]" for p in err.absolute_path)


def _validate(doc: Any, schema: dict, what: str) -> None:
    validator = jsonschema.Draft202012Validator(schema)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(map(str, e.absolute_path)))
    if errors:
        err = errors[0]
        raise InputError(f"invalid {what} at {_path(err)}: {err.message}")


def read_json(text: str, source: str = "<input>") -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"{source}:{e.lineno}:{e.colno}: {e.msg}") from None


def dump_json(doc: Any) -> str:
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


# problems

def problem_from_doc(doc: Any) -> Problem:
    _validate(doc, PROBLEM_SCHEMA, "problem")
    agents, objects = doc["agents"], doc["objects"]
    aix = {s: i for i, s in enumerate(agents)}
    oix = {s: i for i, s in enumerate(objects)}
    universe = [tuple(x) for x in doc["bundleUniverse"]]
    for i, x in enumerate(universe):
        if len(x) != len(objects):
            raise InputError(f"$['bundleUniverse'][{i}] has {len(x)} entries, expected {len(objects)}")

    prefs = doc["preferences"]
    missing = [a for a in agents if a not in prefs]
    extra = [a for a in prefs if a not in aix]
    if missing or extra:
        raise InputError(f"$['preferences'] must list every agent once: missing {missing}, unknown {extra}")
    preferences = [tuple(prefs[a]) for a in agents]

    if "partition" in doc:
        partition = []
        for g, group in enumerate(doc["partition"]):
            for j, s in enumerate(group):
                if s not in aix:
                    raise InputError(f"$['partition'][{g}][{j}]: unknown agent {s!r}")
            partition.append(tuple(aix[s] for s in group))
    else:
        partition = None

    feasible = _feasible_from_doc(doc["feasible"], aix, oix, len(agents), len(objects))
    try:
        return Problem.build(agents, objects, universe, preferences, feasible, partition)
    except (ProblemError, ValueError) as e:
        raise InputError(str(e)) from None


def _feasible_from_doc(f: dict, aix, oix, n: int, m: int):
    if "explicit" in f:
        for k, y in enumerate(f["explicit"]):
            if len(y) != n or any(len(r) != m for r in y):
                raise InputError(f"$['feasible']['explicit'][{k}] is not a {n}x{m} matrix")
        return ExplicitSet.of(f["explicit"])
    if "linearCaps" in f:
        spec = f["linearCaps"]
        caps = []
        for c, cap in enumerate(spec["caps"]):
            weights = {}
            for w, entry in enumerate(cap["weights"]):
                where = f"$['feasible']['linearCaps']['caps'][{c}]['weights'][{w}]"
                if entry["agent"] not in aix:
                    raise InputError(f"{where}: unknown agent {entry['agent']!r}")
                if entry["object"] not in oix:
                    raise InputError(f"{where}: unknown object {entry['object']!r}")
                cell = (aix[entry["agent"]], oix[entry["object"]])
                if cell in weights:
                    raise InputError(f"{where}: duplicate cell")
                weights[cell] = (INELIGIBLE if entry["weight"] == "INELIGIBLE"
                                 else parse_fraction(entry["weight"]))
            try:
                caps.append(Cap(weights, parse_fraction(cap["bound"]), cap.get("label", "")))
            except ValueError as e:
                raise InputError(f"$['feasible']['linearCaps']['caps'][{c}]: {e}") from None
        return LinearCaps(tuple(caps), bool(spec.get("unitDemand", False)))
    spec = f["unitDemandSimpleCapacity"]
    cap = spec["capacity"]
    unknown = [o for o in cap if o not in oix]
    absent = [o for o in oix if o not in cap]
    if unknown or absent:
        raise InputError(
            f"$['feasible']['unitDemandSimpleCapacity']['capacity'] must give every object: "
            f"missing {absent}, unknown {unknown}")
    return UnitDemandSimpleCapacity(tuple(cap[o] for o in oix), bool(spec.get("allowEmpty", False)))


def problem_to_doc(p: Problem, by_preference: Optional[bool] = None) -> dict:
    """Canonical document; ``byPreference`` is emitted when the partition equals it."""
    from .core import partition_by_preference

    doc: dict = {
        "agents": list(p.agents),
        "objects": list(p.objects),
        "bundleUniverse": [list(x) for x in p.universe],
        "preferences": {a: list(p.preferences[i]) for i, a in enumerate(p.agents)},
    }
    if by_preference is None:
        by_preference = p.partition == partition_by_preference(p.preferences)
    if by_preference:
        doc["byPreference"] = True
    else:
        doc["partition"] = [[p.agents[a] for a in g] for g in p.partition]
    F = p.feasible
    if isinstance(F, ExplicitSet):
        doc["feasible"] = {"explicit": [y.to_list() for y in F.sorted_members()]}
    elif isinstance(F, LinearCaps):
        caps = []
        for cap in F.caps:
            entry = {
                "bound": fraction_str(cap.bound),
                "weights": [
                    {"agent": p.agents[a], "object": p.objects[o],
                     "weight": "INELIGIBLE" if w is INELIGIBLE else fraction_str(w)}
                    for (a, o), w in sorted(cap.weights.items())
                ],
            }
            if cap.label:
                entry = {"label": cap.label, **entry}
            caps.append(entry)
        doc["feasible"] = {"linearCaps": {"unitDemand": F.unit_demand, "caps": caps}}
    else:
        doc["feasible"] = {"unitDemandSimpleCapacity": {
            "capacity": {o: q for o, q in zip(p.objects, F.capacity)},
            "allowEmpty": F.allow_empty,
        }}
    return doc


def same_problem(p: Problem, q: Problem) -> bool:
    return (p.agents, p.objects, p.universe, p.preferences, p.partition, p.feasible) == \
        (q.agents, q.objects, q.universe, q.preferences, q.partition, q.feasible)


def load_problem(text: str, source: str = "<input>") -> Problem:
    return problem_from_doc(read_json(text, source))


# lotteries

def lottery_from_doc(doc: Any, p: Problem) -> Lottery:
    _validate(doc, LOTTERY_SCHEMA, "lottery")
    pairs = []
    for k, item in enumerate(doc["lottery"]):
        y = item["assignment"]
        if len(y) != p.n_agents or any(len(r) != p.n_objects for r in y):
            raise InputError(f"$['lottery'][{k}]['assignment'] is not a "
                             f"{p.n_agents}x{p.n_objects} matrix")
        pairs.append((PureAssignment.from_matrix(y), parse_fraction(item["probability"])))
    try:
        return Lottery.from_mapping(p, pairs)
    except LotteryError as e:
        raise InputError(str(e)) from None


def lottery_to_doc(sigma: Lottery) -> dict:
    return {"lottery": [
        {"assignment": y.to_list(), "probability": fraction_str(pr)} for y, pr in sigma.weights
    ]}


def marginal_table(sigma: Lottery) -> dict:
    """Per agent, the probability of each universe bundle (by index)."""
    from .lottery import marginal

    p = sigma.problem
    return {
        p.agents[a]: [fraction_str(marginal(sigma, a).prob(x)) for x in p.universe]
        for a in range(p.n_agents)
    }


def marginal_to_doc(m: Marginal, p: Problem) -> dict:
    idx = p.bundle_index
    return {
        "agent": p.agents[m.agent],
        "distribution": [
            {"bundle": idx[x], "probability": fraction_str(m.dist[x])}
            for x in sorted(m.dist, key=lambda x: idx[x]) if m.dist[x]
        ],
    }


def to_jsonable(obj: Any) -> Any:
    """Fractions become "p/q" strings; tuples become lists."""
    if isinstance(obj, Fraction):
        return fraction_str(obj)
    if isinstance(obj, PureAssignment):
        return obj.to_list()
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    return obj
