"""Command-line interface.

Exit codes: 0 pass, 1 negative verdict, 2 input error, 3 enumeration budget exceeded.
"""
from __future__ import annotations

import argparse
import sys
from typing import Any, Optional, Sequence

from . import repro
from .core import AssumptionViolation, ProblemError, audit_assumption1, audit_assumption2
from .efficiency import efficiency_report, feasible_space, is_ee, is_oe, rank_value, solve_re
from .ete import Mode, check_ete, ete_reassign
from .feasibility import (
    DEFAULT_LIMIT,
    EnumerationBudgetExceeded,
    check_general_upper_bounds,
    check_per_object_upper_bounds,
)
from .io import (
    InputError,
    dump_json,
    fraction_str,
    lottery_from_doc,
    lottery_to_doc,
    marginal_table,
    marginal_to_doc,
    problem_from_doc,
    read_json,
    to_jsonable,
)
from .lottery import Lottery, LotteryError
from .mechanisms import (
    InfeasibleStart,
    NotConsecutiveEquals,
    NotDownwardClosed,
    PriorityList,
    make_consecutive_equals,
    run_pipeline,
    serial_dictatorship,
)
from .strategy import ReportProfile, TableRule, find_manipulation, group_order

EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3

# every library input error derives from ValueError
INPUT_ERRORS = (InputError, ProblemError, AssumptionViolation, LotteryError, NotConsecutiveEquals,
                NotDownwardClosed, InfeasibleStart, ValueError)


def _read(path: str) -> Any:
    if path == "-":
        return read_json(sys.stdin.read(), "<stdin>")
    try:
        with open(path, encoding="utf-8") as fh:
            return read_json(fh.read(), path)
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None


def _problem(path: str):
    return problem_from_doc(_read(path))


def _emit(args, doc: dict, lines: list[str]) -> None:
    if args.format == "json":
        sys.stdout.write(dump_json(to_jsonable(doc)))
    else:
        sys.stdout.write("\n".join(lines) + "\n")


def _matrix_lines(table: dict) -> list[str]:
    width = max(len(a) for a in table)
    return [f"  {a:<{width}}  " + "  ".join(f"{v:>5}" for v in row) for a, row in table.items()]


def _lottery_lines(sigma: Lottery) -> list[str]:
    p = sigma.problem
    out = ["lottery:"]
    for y, pr in sigma.weights:
        out.append(f"  {fraction_str(pr):>6}  {y.to_list()}")
    out.append("marginals (bundle order " + ", ".join(str(list(x)) for x in p.universe) + "):")
    out += _matrix_lines(marginal_table(sigma))
    return out


# subcommands

def cmd_audit(args) -> int:
    p = _problem(args.problem)
    a1, a2 = audit_assumption1(p), audit_assumption2(p)
    gub = check_general_upper_bounds(p.feasible, p, limit=args.budget)
    per = check_per_object_upper_bounds(p.feasible, p, limit=args.budget)

    def audit_doc(r):
        return {"passed": r.passed, "message": r.message, "witness": r.witness}

    doc = {
        "assumption1": audit_doc(a1),
        "assumption2": audit_doc(a2),
        "generalUpperBounds": gub.holds,
        "generalUpperBoundsWitness": None if gub.holds else list(gub.witness),
        "perObjectUpperBounds": per.holds,
    }
    lines = [
        f"assumption-1: {'pass' if a1 else 'FAIL'}  {a1.message}",
        f"assumption-2: {'pass' if a2 else 'FAIL'}  {a2.message}",
        f"general-upper-bounds: {str(gub.holds).lower()}",
        f"per-object-upper-bounds: {str(per.holds).lower()}",
    ]
    if not gub.holds:
        y, z = gub.witness
        lines.append(f"  {y.to_list()} is feasible but {z.to_list()} is not")
    _emit(args, doc, lines)
    return EXIT_OK if a1 and a2 else EXIT_NEGATIVE


def _priority(p, labels: Optional[str]) -> PriorityList:
    if labels is None:
        return make_consecutive_equals(p.partition)
    return PriorityList.from_labels(p, [s.strip() for s in labels.split(",") if s.strip()])


def cmd_run(args) -> int:
    p = _problem(args.problem)
    alpha = _priority(p, args.priority)
    if args.mechanism == "sd":
        sigma = Lottery.point_mass(p, serial_dictatorship(p, alpha))
    else:
        sigma = run_pipeline(p, alpha, Mode(args.mode))
    Y = feasible_space(p, args.budget)
    rep = efficiency_report(sigma, Y)
    ete = check_ete(sigma)
    doc = {
        "mechanism": args.mechanism,
        "priority": [p.agents[a] for a in alpha],
        **lottery_to_doc(sigma),
        "marginals": marginal_table(sigma),
        "ete": ete.holds,
        "ee": rep.ee,
        "oe": rep.oe,
        "re": rep.re,
        "rankValue": rep.rank_value,
        "optimalRankValue": rep.optimal_rank_value,
    }
    lines = [f"mechanism: {args.mechanism}  priority: {' '.join(doc['priority'])}"]
    lines += _lottery_lines(sigma)
    lines += [
        f"ETE: {ete.holds}  EE: {rep.ee}  OE: {rep.oe}  RE: {rep.re}",
        f"R(sigma) = {fraction_str(rep.rank_value)}  R* = {rep.optimal_rank_value}",
    ]
    _emit(args, doc, lines)
    return EXIT_OK


def cmd_check(args) -> int:
    p = _problem(args.problem)
    sigma = lottery_from_doc(_read(args.lottery), p)
    wanted = [f for f in ("ete", "ee", "oe", "re") if getattr(args, f)] or ["ete", "ee", "oe", "re"]
    Y = feasible_space(p, args.budget) if wanted != ["ete"] else None
    doc: dict = {}
    lines = []
    if "ete" in wanted:
        r = check_ete(sigma)
        doc["ete"] = {"holds": r.holds}
        line = f"ETE: {'yes' if r else 'no'}"
        if not r:
            a, b, x = r.witness
            doc["ete"]["witness"] = {"agents": [p.agents[a], p.agents[b]], "bundle": list(x)}
            line += f"  ({p.agents[a]} and {p.agents[b]} differ on bundle {list(x)})"
        lines.append(line)
    if "ee" in wanted:
        r = is_ee(sigma, Y)
        doc["ee"] = {"holds": r.holds}
        line = f"EE: {'yes' if r else 'no'}"
        if not r:
            doc["ee"]["witness"] = {"inefficient": r.inefficient, "dominatedBy": r.dominator}
            line += f"  ({r.inefficient.to_list()} is Pareto dominated by {r.dominator.to_list()})"
        lines.append(line)
    if "oe" in wanted:
        r = is_oe(sigma, Y)
        doc["oe"] = {"holds": r.holds, "gap": r.gap}
        lines.append(f"OE: {'yes' if r else 'no'}  (rank gap {fraction_str(r.gap)})")
        if not r:
            doc["oe"]["witness"] = lottery_to_doc(r.witness)["lottery"]
            doc["oe"]["witnessMarginals"] = marginal_table(r.witness)
            lines.append("dominating lottery:")
            lines += _lottery_lines(r.witness)[1:]
    if "re" in wanted:
        R, best = rank_value(sigma), solve_re(p, Y)
        doc["re"] = {"holds": R == best.value, "rankValue": R, "optimalRankValue": best.value}
        lines.append(f"RE: {'yes' if R == best.value else 'no'}  "
                     f"(R = {fraction_str(R)}, R* = {best.value})")
    _emit(args, doc, lines)
    return EXIT_OK if all(doc[k]["holds"] for k in doc) else EXIT_NEGATIVE


def cmd_ete(args) -> int:
    p = _problem(args.problem)
    sigma = lottery_from_doc(_read(args.lottery), p)
    out = ete_reassign(sigma, Mode(args.mode))
    doc = {"mode": args.mode, **lottery_to_doc(out), "marginals": marginal_table(out)}
    _emit(args, doc, [f"mode: {args.mode}"] + _lottery_lines(out))
    return EXIT_OK


def cmd_re(args) -> int:
    p = _problem(args.problem)
    Y = None if args.fast else feasible_space(p, args.budget)
    sol = solve_re(p, Y, fast=args.fast)
    doc = {"optimalRankValue": sol.value, "method": sol.method,
           "optimal": [y.to_list() for y in sol.optimal]}
    lines = [f"R* = {sol.value}  ({sol.method}, {len(sol.optimal)} minimizer(s))"]
    lines += [f"  {y.to_list()}" for y in sol.optimal]
    _emit(args, doc, lines)
    return EXIT_OK


def _table_rule(p, path: Optional[str]) -> TableRule:
    if path is None:
        return TableRule({}, group_order)
    doc = _read(path)
    table = {}
    try:
        for k, rule in enumerate(doc["rules"]):
            key = tuple(tuple(p.agent_index(s) for s in g) for g in rule["partition"])
            table[key] = PriorityList.from_labels(p, rule["priority"]).order
    except (KeyError, TypeError) as e:
        raise InputError(f"{path}: selection table needs rules[*].partition and .priority ({e})") from None
    return TableRule(table, group_order)


def _parse_order(p, text: str) -> tuple[int, ...]:
    try:
        order = tuple(int(s) for s in text.split(","))
    except ValueError:
        raise InputError(f"misreport {text!r} must be comma-separated bundle indices") from None
    if sorted(order) != list(range(len(p.universe))):
        raise InputError(f"misreport {text!r} is not an order over the bundle universe")
    return order


def cmd_manipulate(args) -> int:
    p = _problem(args.problem)
    rule = _table_rule(p, args.table)
    truth = ReportProfile(p.preferences, rule)
    agents = [p.agent_index(a) for a in args.agent] if args.agent else None
    lies = [_parse_order(p, s) for s in args.misreport] if args.misreport else None
    found = find_manipulation(truth, p, agents=agents, misreports=lies,
                              limit=args.budget)
    if found is None:
        _emit(args, {"finding": None}, ["no manipulation found in scope"])
        return EXIT_OK
    a = found.agent
    doc = {"finding": {
        "manipulator": p.agents[a],
        "trueOrder": list(p.preferences[a]),
        "misreport": list(found.misreport),
        "truthful": marginal_to_doc(found.truthful, p),
        "manipulated": marginal_to_doc(found.manipulated, p),
        "verdict": found.verdict.value,
        "certificate": {
            "truthfulUpperCdf": _profile(found.truthful, p, a),
            "manipulatedUpperCdf": _profile(found.manipulated, p, a),
        },
    }}
    cert = doc["finding"]["certificate"]
    lines = [
        f"{p.agents[a]} gains by reporting {list(found.misreport)} instead of {list(p.preferences[a])}",
        f"  truthful upper CDF:    {' '.join(cert['truthfulUpperCdf'])}",
        f"  manipulated upper CDF: {' '.join(cert['manipulatedUpperCdf'])}",
    ]
    _emit(args, doc, lines)
    return EXIT_NEGATIVE


def _profile(m, p, agent) -> list[str]:
    from .lottery import upper_cdf_profile

    return [fraction_str(h) for h in upper_cdf_profile(m, p.ranking(agent))]


def cmd_repro(args) -> int:
    ids = repro.EXAMPLES if args.example == "all" else (int(args.example),)
    doc, lines, ok = {}, [], True
    for n in ids:
        checks = repro.run(n)
        ok = ok and all(c.passed for c in checks)
        doc[f"example{n}"] = [{"check": c.name, "passed": c.passed,
                               **({} if c.passed else {"expected": c.expected, "actual": c.actual})}
                              for c in checks]
        lines.append(f"example {n}")
        lines += ["  " + c.line() for c in checks]
    _emit(args, doc, lines)
    return EXIT_OK if ok else EXIT_NEGATIVE


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("table", "json"), default="table")
    common.add_argument("--budget", type=int, default=DEFAULT_LIMIT,
                        help="cap on enumerated assignments or candidate misreports")
    common.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.CYCLIC.value,
                        help="within-group bijections used by the ETE reassignment")

    parser = argparse.ArgumentParser(prog="ete-assign", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    s = sub.add_parser("audit", parents=[common], help="audit equals assumptions and constraint structure")
    s.add_argument("problem")
    s.set_defaults(func=cmd_audit)

    s = sub.add_parser("run", parents=[common], help="run serial dictatorship or the ETE pipeline")
    s.add_argument("problem")
    s.add_argument("--mechanism", choices=("sd", "pipeline"), default="pipeline")
    s.add_argument("--priority", help="comma-separated agent labels (default: groups in order)")
    s.set_defaults(func=cmd_run)

    s = sub.add_parser("check", parents=[common], help="check a lottery for ETE and efficiency")
    s.add_argument("problem")
    s.add_argument("lottery")
    for flag in ("ete", "ee", "oe", "re"):
        s.add_argument(f"--{flag}", action="store_true")
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("ete", parents=[common], help="ETE reassignment of a lottery")
    s.add_argument("problem")
    s.add_argument("lottery")
    s.set_defaults(func=cmd_ete)

    s = sub.add_parser("re", parents=[common], help="minimum expected rank total")
    s.add_argument("problem")
    s.add_argument("--exhaustive", dest="fast", action="store_false",
                   help="enumerate Y instead of the matching fast path")
    s.set_defaults(func=cmd_re)

    s = sub.add_parser("manipulate", parents=[common], help="search for profitable misreports")
    s.add_argument("problem")
    s.add_argument("--agent", action="append", help="agent label to scan (repeatable)")
    s.add_argument("--misreport", action="append",
                   help="candidate order as comma-separated bundle indices (repeatable)")
    s.add_argument("--table", help="JSON selection table: {rules: [{partition, priority}]}")
    s.set_defaults(func=cmd_manipulate)

    s = sub.add_parser("repro", parents=[common], help="reproduce a worked example")
    s.add_argument("example", choices=[str(n) for n in repro.EXAMPLES] + ["all"])
    s.set_defaults(func=cmd_repro)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except EnumerationBudgetExceeded as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except INPUT_ERRORS as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
