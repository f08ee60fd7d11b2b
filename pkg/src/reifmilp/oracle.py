"""Brute-force ground truth. Never touches the LP or branch-and-bound code.

``brute_force`` walks the whole integer box of a model in lexicographic order
(variable 0 most significant). Rows are evaluated in chunks with int64
arithmetic when the data provably cannot overflow, and with Python ints via
the model's own evaluators otherwise.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from .errors import SearchSpaceTooLarge
from .model import Assignment, Model, ObjectiveSense, Sense
from .sequence import KernelApplication, Mode, SequenceSpec, parse_kernel_id

DEFAULT_GUARD = 10**7
_CHUNK = 1 << 16
_INT64_SAFE = 1 << 62


@dataclass
class OracleReport:
    feasible_count: int
    optimum: Optional[int] = None
    argmax: Optional[Assignment] = None
    enumerated: Optional[List[Assignment]] = field(default=None, repr=False)


def brute_force(model: Model, collect: bool = False, guard: int = DEFAULT_GUARD) -> OracleReport:
    size = model.search_space()
    if size > guard:
        raise SearchSpaceTooLarge(f"search space {size} exceeds guard {guard}")
    if _int64_safe(model):
        return _vectorised(model, collect)
    return _scalar(model, collect)


def _int64_safe(model: Model) -> bool:
    reach = max((max(abs(v.lo), abs(v.hi)) for v in model.variables), default=0)
    for c in model.constraints:
        if sum(abs(a) for _, a in c.terms) * reach + abs(c.rhs) >= _INT64_SAFE:
            return False
    return sum(abs(w) for _, w in model.objective.terms) * reach < _INT64_SAFE


def _better(sense: ObjectiveSense, value: int, best: Optional[int]) -> bool:
    if best is None:
        return True
    return value > best if sense is ObjectiveSense.MAXIMIZE else value < best


def _scalar(model: Model, collect: bool) -> OracleReport:
    sense = model.objective.sense
    report = OracleReport(0, enumerated=[] if collect else None)
    ranges = [range(v.lo, v.hi + 1) for v in model.variables]
    for combo in itertools.product(*ranges):
        values = dict(enumerate(combo))
        if not all(c.holds(values) for c in model.constraints):
            continue
        report.feasible_count += 1
        if collect:
            report.enumerated.append(values)
        if sense is ObjectiveSense.FEASIBILITY:
            if report.argmax is None:
                report.argmax = values
            continue
        value = model.objective_value(values)
        if _better(sense, value, report.optimum):
            report.optimum, report.argmax = value, values
    return report


def _vectorised(model: Model, collect: bool) -> OracleReport:
    n = model.num_vars
    size = model.search_space()
    sense = model.objective.sense
    report = OracleReport(0, enumerated=[] if collect else None)
    if size == 0:
        return report

    lo = np.array([v.lo for v in model.variables], dtype=np.int64)
    span = np.array([v.span for v in model.variables], dtype=np.int64)
    # mixed-radix place values, last variable fastest
    place = np.ones(n, dtype=np.int64)
    for d in range(n - 2, -1, -1):
        place[d] = place[d + 1] * span[d + 1]

    A = np.zeros((len(model.constraints), n), dtype=np.int64)
    for i, c in enumerate(model.constraints):
        for var, a in c.terms:
            A[i, var] = a
    rhs = np.array([c.rhs for c in model.constraints], dtype=np.int64)
    le = np.array([c.sense is Sense.LE for c in model.constraints], dtype=bool)
    ge = np.array([c.sense is Sense.GE for c in model.constraints], dtype=bool)
    eq = np.array([c.sense is Sense.EQ for c in model.constraints], dtype=bool)
    w = np.zeros(n, dtype=np.int64)
    for var, weight in model.objective.terms:
        w[var] += weight

    for start in range(0, size, _CHUNK):
        idx = np.arange(start, min(start + _CHUNK, size), dtype=np.int64)
        X = lo + (idx[:, None] // place) % span if n else np.zeros((len(idx), 0), dtype=np.int64)
        act = X @ A.T
        ok = np.all((act <= rhs) | ~le, axis=1) & np.all((act >= rhs) | ~ge, axis=1) & np.all((act == rhs) | ~eq, axis=1)
        hits = X[ok]
        if not len(hits):
            continue
        report.feasible_count += len(hits)
        if collect:
            report.enumerated.extend(dict(enumerate(int(v) for v in row)) for row in hits)
        if sense is ObjectiveSense.FEASIBILITY:
            if report.argmax is None:
                report.argmax = dict(enumerate(int(v) for v in hits[0]))
            continue
        vals = hits @ w
        k = int(np.argmax(vals) if sense is ObjectiveSense.MAXIMIZE else np.argmin(vals))
        if _better(sense, int(vals[k]), report.optimum):
            report.optimum = int(vals[k])
            report.argmax = dict(enumerate(int(v) for v in hits[k]))
    return report


def property_oracle_sequence(
    spec: SequenceSpec,
    applications: Sequence[KernelApplication],
    guard: int = DEFAULT_GUARD,
) -> Optional[int]:
    """Best total soft weight over raw state sequences, tested as ``s_t % k == r``.

    Require-mode applications filter the sequences; soft ones score. Returns
    ``None`` when no sequence meets the requirements.
    """
    span = spec.state_hi - spec.state_lo + 1
    size = span ** (spec.length + 1)
    if size > guard:
        raise SearchSpaceTooLarge(f"search space {size} exceeds guard {guard}")
    props = [(app.step, *parse_kernel_id(app.kernel), app.mode, app.weight) for app in applications]
    best: Optional[int] = None
    for states in itertools.product(range(spec.state_lo, spec.state_hi + 1), repeat=spec.length + 1):
        score = 0
        for step, k, r, mode, weight in props:
            holds = states[step] % k == r
            if mode is Mode.REQUIRE:
                if not holds:
                    break
            elif holds:
                score += weight
        else:
            if best is None or score > best:
                best = score
    return best
