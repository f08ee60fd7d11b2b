"""Command-line entry point: ``reifmilp {solve,check,enumerate,oracle,encode} MODEL``.

Exit codes: 0 success or feasible, 1 usage, parse or internal error (and a
rejected assignment for ``check``), 2 proven infeasible.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Union

from . import csp as csp_mod
from .errors import ParseError, ReifMilpError, ValidationError
from .lpformat import write_lp
from .mip import DEFAULT_GUARD, MipStatus, enumerate_solutions, solve_mip
from .model import Assignment, from_parts
from .modelfile import ParsedModel, parse_model
from .oracle import brute_force

EXIT_OK, EXIT_ERROR, EXIT_INFEASIBLE = 0, 1, 2

Value = Union[int, str]


def readable(parsed: ParsedModel, values: Assignment) -> Dict[str, Value]:
    """Assignment keyed by name, one-hot CSP blocks decoded, sorted by name."""
    model = parsed.model
    out: Dict[str, Value] = {}
    hidden = set()
    if parsed.csp is not None:
        out.update(csp_mod.decode(parsed.csp, values))
        hidden = parsed.csp.members()
    for vid, x in values.items():
        if vid not in hidden:
            out[model.name_of(vid)] = x
    return dict(sorted(out.items()))


def _line(values: Dict[str, Value]) -> str:
    return " ".join(f"{k}={v}" for k, v in values.items())


def _emit(args: argparse.Namespace, payload: dict, lines: List[str]) -> None:
    if args.json:
        print(json.dumps(payload, indent=2))
    else:
        for line in lines:
            print(line)


def cmd_solve(args: argparse.Namespace) -> int:
    parsed = parse_model(args.model)
    result = solve_mip(parsed.model, verbose=args.verbose)
    if result.status is MipStatus.INFEASIBLE:
        _emit(args, {"status": "INFEASIBLE", "nodes": result.nodes}, ["INFEASIBLE", f"nodes={result.nodes}"])
        return EXIT_INFEASIBLE
    assignment = readable(parsed, result.best)
    payload = {
        "status": "OPTIMAL",
        "objective": result.objective,
        "bound": result.bound,
        "nodes": result.nodes,
        "assignment": assignment,
    }
    lines = ["OPTIMAL", f"objective={result.objective}", f"bound={result.bound}", f"nodes={result.nodes}"]
    lines += [f"{k}={v}" for k, v in assignment.items()]
    _emit(args, payload, lines)
    return EXIT_OK


def check_assignment(parsed: ParsedModel, given: Dict[str, Value]) -> List[str]:
    """Violations of ``given`` against ``parsed``; empty means feasible.

    CSP variables take domain labels and are judged by the homomorphism
    condition. Every other declared variable needs an integer value. Kernel
    auxiliaries may be left out; a feasible completion is then searched for.
    """
    model = parsed.model
    problems: List[str] = []
    values: Assignment = {}
    given = dict(given)

    if parsed.csp is not None:
        instance = parsed.csp.instance
        mapping = {v: given.pop(v) for v in instance.variables if v in given}
        missing = [v for v in instance.variables if v not in mapping]
        if missing:
            return [f"missing value for csp variable {v}" for v in missing]
        for v, d in mapping.items():
            if d not in instance.domain.values:
                problems.append(f"{v}: {d!r} is not in the domain")
        if problems:
            return problems
        for c in csp_mod.violated_constraints(instance, mapping):
            u, w = c.scope
            problems.append(f"neq({u},{w}): {u}={mapping[u]} {w}={mapping[w]}")
        values.update(parsed.csp.lift(mapping))

    for name, x in given.items():
        if not model.has_var(name):
            problems.append(f"unknown variable {name}")
            continue
        vid = model.var(name)
        if vid in values:
            problems.append(f"{name} is part of a csp block; give the csp variable instead")
            continue
        if isinstance(x, bool) or not isinstance(x, int):
            problems.append(f"{name}: value {x!r} is not an integer")
            continue
        var = model.variables[vid]
        if not var.lo <= x <= var.hi:
            problems.append(f"{name}={x} outside [{var.lo}, {var.hi}]")
        values[vid] = x
    open_vars = [v.id for v in model.variables if v.id not in values]
    for vid in open_vars:
        if vid not in parsed.auxiliary:
            problems.append(f"missing value for {model.name_of(vid)}")
    if problems:
        return problems

    pending = []
    for i, c in enumerate(model.constraints):
        if i in parsed.csp_rows:
            continue
        if all(v in values for v, _ in c.terms):
            if not c.holds(values):
                problems.append(f"{c.label}: {c.sense.value} {c.rhs} violated (lhs={c.activity(values)})")
        else:
            pending.append(c)
    if problems or not open_vars:
        return problems

    # existential completion of kernel auxiliaries
    variables = []
    for v in model.variables:
        if v.id in values:
            v = type(v)(v.id, v.name, v.kind, values[v.id], values[v.id])
        variables.append(v)
    fixed = from_parts(variables, pending)
    if not enumerate_solutions(fixed, limit=1):
        labels = ", ".join(c.label for c in pending)
        problems.append(f"no values of the kernel auxiliaries satisfy rows {labels}")
    return problems


def cmd_check(args: argparse.Namespace) -> int:
    parsed = parse_model(args.model)
    try:
        given = json.loads(Path(args.assignment).read_text() or "{}")
    except json.JSONDecodeError as exc:
        raise ParseError(f"assignment is not valid JSON: {exc.msg}", exc.lineno, exc.colno) from None
    if not isinstance(given, dict):
        raise ParseError("assignment must be a JSON object of name: value", 1, 1)
    problems = check_assignment(parsed, given)
    status = "FEASIBLE" if not problems else "INFEASIBLE"
    lines = [status] + [f"violation: {p}" for p in problems] + [f"violations={len(problems)}"]
    _emit(args, {"status": status, "violations": problems, "count": len(problems)}, lines)
    return EXIT_OK if not problems else EXIT_ERROR


def cmd_enumerate(args: argparse.Namespace) -> int:
    parsed = parse_model(args.model)
    solutions = enumerate_solutions(parsed.model, limit=args.limit, guard=args.guard)
    rows = [readable(parsed, s) for s in solutions]
    lines = [_line(r) for r in rows] + [f"count={len(rows)}"]
    _emit(args, {"solutions": rows, "count": len(rows), "limit": args.limit}, lines)
    return EXIT_OK if rows else EXIT_INFEASIBLE


def cmd_oracle(args: argparse.Namespace) -> int:
    parsed = parse_model(args.model)
    report = brute_force(parsed.model, collect=True, guard=args.guard)
    shown = report.enumerated if args.limit is None else report.enumerated[: args.limit]
    rows = [readable(parsed, s) for s in shown]
    argmax = readable(parsed, report.argmax) if report.argmax is not None else None
    lines = [_line(r) for r in rows]
    if report.optimum is not None:
        lines.append(f"optimum={report.optimum}")
    lines.append(f"count={report.feasible_count}")
    payload = {"solutions": rows, "optimum": report.optimum, "argmax": argmax, "count": report.feasible_count}
    _emit(args, payload, lines)
    return EXIT_OK if report.feasible_count else EXIT_INFEASIBLE


def cmd_encode(args: argparse.Namespace) -> int:
    parsed = parse_model(args.model)
    text = write_lp(parsed.model)
    if args.output:
        Path(args.output).write_text(text)
        if args.json:
            print(json.dumps({"output": str(args.output), "bytes": len(text.encode())}))
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="reifmilp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("model", help="model file")
        p.add_argument("--json", action="store_true", help="machine-readable output")
        p.add_argument("--verbose", action="store_true", help="search progress on stderr")
        p.add_argument("--guard", type=int, default=DEFAULT_GUARD, help="max assignments for exhaustive search")
        p.add_argument("--limit", type=int, default=None, help="stop after N solutions")

    p = sub.add_parser("solve", help="optimise with branch-and-bound")
    common(p)
    p.set_defaults(func=cmd_solve)
    p = sub.add_parser("check", help="check an assignment (JSON name: value)")
    common(p)
    p.add_argument("assignment", help="JSON assignment file")
    p.set_defaults(func=cmd_check)
    p = sub.add_parser("enumerate", help="list all feasible assignments")
    common(p)
    p.set_defaults(func=cmd_enumerate)
    p = sub.add_parser("oracle", help="brute-force the full integer box")
    common(p)
    p.set_defaults(func=cmd_oracle)
    p = sub.add_parser("encode", help="export to LP text")
    common(p)
    p.add_argument("-o", "--output", help="write here instead of stdout")
    p.set_defaults(func=cmd_encode)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else EXIT_OK
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"{args.model}:{exc}", file=sys.stderr)
    except ValidationError as exc:
        for v in exc.violations:
            print(f"{args.model}: {v}", file=sys.stderr)
    except (ReifMilpError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
