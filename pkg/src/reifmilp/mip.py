"""Depth-first branch-and-bound over the LP relaxation, and exact enumeration."""

from __future__ import annotations

import enum
import math
import sys
from dataclasses import dataclass
from typing import IO, List, Optional

import numpy as np

from .errors import SearchSpaceTooLarge, ValidationError
from .lp import INT_TOL, LpStatus, relax, solve_lp
from .model import Assignment, Model, ObjectiveSense, Sense

DEFAULT_GUARD = 10**7


class MipStatus(enum.Enum):
    OPTIMAL = "OPTIMAL"
    INFEASIBLE = "INFEASIBLE"


@dataclass
class MipResult:
    status: MipStatus
    best: Optional[Assignment] = None
    objective: Optional[int] = None
    bound: Optional[int] = None
    nodes: int = 0


def solve_mip(model: Model, verbose: bool = False, stream: IO[str] = None) -> MipResult:
    """Exact optimum of ``model`` by LP-based branch-and-bound.

    Nodes are explored depth-first, floor child first. The branching variable
    is the most fractional one (lowest id on ties). Candidate points are
    rounded and accepted only when they pass exact integer feasibility, so
    float drift in the relaxation can never produce a wrong incumbent.
    """
    model.check()
    stream = stream or sys.stderr
    problem = relax(model)
    sign = -1 if model.objective.sense is ObjectiveSense.MINIMIZE else 1
    n = model.num_vars

    incumbent: Optional[Assignment] = None
    best = -math.inf  # in maximisation terms
    stack = [(problem.lo.copy(), problem.hi.copy())]
    nodes = 0

    while stack:
        lo, hi = stack.pop()
        nodes += 1
        outcome = solve_lp(problem, lo, hi)
        if outcome.status is LpStatus.INFEASIBLE:
            if verbose:
                print(f"node={nodes} bound=infeasible incumbent={_fmt(best, sign)}", file=stream)
            continue
        bound = math.floor(sign * outcome.objective + INT_TOL)
        if verbose:
            print(f"node={nodes} bound={sign * bound} incumbent={_fmt(best, sign)}", file=stream)
        if bound <= best:
            continue

        point = outcome.point
        rounded = np.rint(point)
        candidate = {i: int(rounded[i]) for i in range(n)}
        if model.is_feasible(candidate):
            value = sign * model.objective_value(candidate)
            if value > best:
                best, incumbent = value, candidate
                if bound <= best:
                    continue

        frac = np.abs(point - rounded)
        if frac.max(initial=0.0) > INT_TOL:
            # most fractional: distance from the nearest integer is largest
            j = int(np.argmax(frac))
            v = point[j]
            down, up = math.floor(v), math.ceil(v)
        else:
            # integral up to tolerance yet not exactly feasible: split the first free variable
            free = np.flatnonzero(hi > lo)
            if free.size == 0:
                continue
            j = int(free[0])
            down = int(min(max(rounded[j], lo[j]), hi[j] - 1))
            up = down + 1
        hi_down = hi.copy()
        hi_down[j] = down
        lo_up = lo.copy()
        lo_up[j] = up
        stack.append((lo_up, hi))
        stack.append((lo, hi_down))

    if incumbent is None:
        return MipResult(MipStatus.INFEASIBLE, nodes=nodes)
    objective = model.objective_value(incumbent)
    return MipResult(MipStatus.OPTIMAL, incumbent, objective, objective, nodes)


def _fmt(best: float, sign: int) -> str:
    return "none" if best == -math.inf else str(int(sign * best))


def enumerate_solutions(model: Model, limit: Optional[int] = None, guard: int = DEFAULT_GUARD) -> List[Assignment]:
    """All feasible assignments in lexicographic order (by var id, ascending value).

    Plain depth-first assignment with interval pruning on every row: a branch
    is cut as soon as the partial sum plus the reachable range of the
    unassigned suffix cannot meet the right-hand side.
    """
    violations = model.validate()
    if violations:
        raise ValidationError(violations)
    size = model.search_space()
    if limit is None and size > guard:
        raise SearchSpaceTooLarge(f"search space {size} exceeds guard {guard}; pass a limit")
    if limit is not None and limit <= 0:
        return []

    n = model.num_vars
    los = [v.lo for v in model.variables]
    his = [v.hi for v in model.variables]
    rows = []
    for c in model.constraints:
        coef = [0] * n
        for var, a in c.terms:
            coef[var] = a
        # reachable [min, max] of the suffix starting at each depth
        smin = [0] * (n + 1)
        smax = [0] * (n + 1)
        for d in range(n - 1, -1, -1):
            a = coef[d]
            lo_c, hi_c = (a * los[d], a * his[d]) if a >= 0 else (a * his[d], a * los[d])
            smin[d] = smin[d + 1] + lo_c
            smax[d] = smax[d + 1] + hi_c
        rows.append((coef, c.sense, c.rhs, smin, smax))
    # rows touching each depth, so a level only re-checks what changed
    touching = [[i for i, r in enumerate(rows) if r[0][d] != 0] for d in range(n)]

    out: List[Assignment] = []
    partial = [0] * len(rows)
    values = [0] * n

    def viable(i: int, depth: int) -> bool:
        _, sense, rhs, smin, smax = rows[i]
        low = partial[i] + smin[depth]
        high = partial[i] + smax[depth]
        if sense is Sense.LE:
            return low <= rhs
        if sense is Sense.GE:
            return high >= rhs
        return low <= rhs <= high

    if not all(viable(i, 0) for i in range(len(rows))):
        return out

    def descend(depth: int) -> bool:
        if depth == n:
            out.append(dict(enumerate(values)))
            return limit is not None and len(out) >= limit
        touched = touching[depth]
        for value in range(los[depth], his[depth] + 1):
            values[depth] = value
            for i in touched:
                partial[i] += rows[i][0][depth] * value
            ok = all(viable(i, depth + 1) for i in touched)
            stop = ok and descend(depth + 1)
            for i in touched:
                partial[i] -= rows[i][0][depth] * value
            if stop:
                return True
        return False

    previous = sys.getrecursionlimit()
    sys.setrecursionlimit(max(previous, n + 200))
    try:
        descend(0)
    finally:
        sys.setrecursionlimit(previous)
    return out
