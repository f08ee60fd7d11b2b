"""Exact-integer linear model shared by the front-ends, the solvers and the oracle.

Every coefficient, bound, right-hand side and objective weight is a Python
``int``. Indicator constraints are stored already expanded into plain linear
rows, so the solvers only ever see one kind of constraint.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .errors import (
    DuplicateName,
    DuplicateTerm,
    InvertedBounds,
    MissingValue,
    UnknownVar,
    ValidationError,
)

VarId = int
Assignment = Dict[VarId, int]
Term = Tuple[VarId, int]


class VarKind(enum.Enum):
    INTEGER = "int"
    BINARY = "binary"


class Sense(enum.Enum):
    LE = "<="
    GE = ">="
    EQ = "="


class ObjectiveSense(enum.Enum):
    MAXIMIZE = "max"
    MINIMIZE = "min"
    FEASIBILITY = "feasibility"


@dataclass(frozen=True)
class Variable:
    id: VarId
    name: str
    kind: VarKind
    lo: int
    hi: int

    @property
    def span(self) -> int:
        return self.hi - self.lo + 1


@dataclass(frozen=True)
class LinearConstraint:
    terms: Tuple[Term, ...]
    sense: Sense
    rhs: int
    label: str = ""

    def activity(self, values: Mapping[VarId, int]) -> int:
        total = 0
        for var, coef in self.terms:
            try:
                total += coef * values[var]
            except KeyError:
                raise MissingValue(f"no value for variable {var} in {self.label or 'constraint'}") from None
        return total

    def holds(self, values: Mapping[VarId, int]) -> bool:
        lhs = self.activity(values)
        if self.sense is Sense.LE:
            return lhs <= self.rhs
        if self.sense is Sense.GE:
            return lhs >= self.rhs
        return lhs == self.rhs


@dataclass(frozen=True)
class Objective:
    sense: ObjectiveSense = ObjectiveSense.FEASIBILITY
    terms: Tuple[Term, ...] = ()

    def value(self, values: Mapping[VarId, int]) -> int:
        if self.sense is ObjectiveSense.FEASIBILITY:
            return 0
        total = 0
        for var, weight in self.terms:
            try:
                total += weight * values[var]
            except KeyError:
                raise MissingValue(f"no value for objective variable {var}") from None
        return total


@dataclass(frozen=True)
class Violation:
    kind: str
    message: str

    def __str__(self) -> str:
        return f"{self.kind}: {self.message}"


def eval_constraint(constraint: LinearConstraint, assignment: Mapping[VarId, int]) -> bool:
    """Exact check of one row; raises MissingValue if a referenced var is unset."""
    return constraint.holds(assignment)


def eval_objective(objective: Objective, assignment: Mapping[VarId, int]) -> int:
    return objective.value(assignment)


@dataclass
class Model:
    variables: List[Variable] = field(default_factory=list)
    constraints: List[LinearConstraint] = field(default_factory=list)
    objective: Objective = field(default_factory=Objective)

    def __post_init__(self) -> None:
        self._by_name: Dict[str, VarId] = {v.name: v.id for v in self.variables}

    # -- construction ---------------------------------------------------

    def add_int_var(self, name: str, lo: int, hi: int) -> VarId:
        return self._add_var(name, VarKind.INTEGER, lo, hi)

    def add_bool_var(self, name: str) -> VarId:
        return self._add_var(name, VarKind.BINARY, 0, 1)

    def _add_var(self, name: str, kind: VarKind, lo: int, hi: int) -> VarId:
        if not name:
            raise DuplicateName("variable name must be nonempty")
        if name in self._by_name:
            raise DuplicateName(f"variable {name!r} already declared")
        lo, hi = int(lo), int(hi)
        if lo > hi:
            raise InvertedBounds(f"variable {name!r} has lo={lo} > hi={hi}")
        vid = len(self.variables)
        self.variables.append(Variable(vid, name, kind, lo, hi))
        self._by_name[name] = vid
        return vid

    def unique_name(self, base: str) -> str:
        """First of ``base``, ``base_1``, ``base_2``, ... not yet declared."""
        if base not in self._by_name:
            return base
        i = 1
        while f"{base}_{i}" in self._by_name:
            i += 1
        return f"{base}_{i}"

    def add_constraint(
        self,
        terms: Iterable[Term],
        sense: Sense,
        rhs: int,
        label: Optional[str] = None,
    ) -> int:
        terms = tuple((int(v), int(c)) for v, c in terms)
        seen = set()
        for var, _ in terms:
            if not 0 <= var < len(self.variables):
                raise UnknownVar(f"constraint references unknown variable {var}")
            if var in seen:
                raise DuplicateTerm(f"variable {self.variables[var].name!r} appears twice in one constraint")
            seen.add(var)
        index = len(self.constraints)
        self.constraints.append(LinearConstraint(terms, sense, int(rhs), label or f"c{index}"))
        return index

    def set_objective(self, sense: ObjectiveSense, terms: Iterable[Term] = ()) -> None:
        terms = tuple((int(v), int(w)) for v, w in terms)
        if sense is ObjectiveSense.FEASIBILITY:
            terms = ()
        for var, _ in terms:
            if not 0 <= var < len(self.variables):
                raise UnknownVar(f"objective references unknown variable {var}")
        self.objective = Objective(sense, terms)

    # -- lookup ---------------------------------------------------------

    def var(self, name: str) -> VarId:
        try:
            return self._by_name[name]
        except KeyError:
            raise UnknownVar(f"no variable named {name!r}") from None

    def has_var(self, name: str) -> bool:
        return name in self._by_name

    def name_of(self, vid: VarId) -> str:
        return self.variables[vid].name

    @property
    def num_vars(self) -> int:
        return len(self.variables)

    def search_space(self) -> int:
        size = 1
        for v in self.variables:
            size *= max(v.span, 0)
        return size

    # -- evaluation -----------------------------------------------------

    def is_feasible(self, values: Mapping[VarId, int]) -> bool:
        for v in self.variables:
            x = values.get(v.id)
            if x is None or not v.lo <= x <= v.hi:
                return False
        return all(c.holds(values) for c in self.constraints)

    def violated(self, values: Mapping[VarId, int]) -> List[LinearConstraint]:
        return [c for c in self.constraints if not c.holds(values)]

    def objective_value(self, values: Mapping[VarId, int]) -> int:
        return self.objective.value(values)

    def by_name(self, values: Mapping[VarId, int]) -> Dict[str, int]:
        return {self.variables[k].name: x for k, x in values.items()}

    # -- validation -----------------------------------------------------

    def validate(self) -> List[Violation]:
        out: List[Violation] = []
        names = set()
        for i, v in enumerate(self.variables):
            if v.id != i:
                out.append(Violation("BadVarId", f"variable {v.name!r} has id {v.id}, expected {i}"))
            if not v.name:
                out.append(Violation("EmptyName", f"variable {i} has an empty name"))
            if v.name in names:
                out.append(Violation("DuplicateName", f"variable {v.name!r} declared twice"))
            names.add(v.name)
            if v.lo > v.hi:
                out.append(Violation("InvertedBounds", f"variable {v.name!r} has lo={v.lo} > hi={v.hi}"))
            if v.kind is VarKind.BINARY and (v.lo, v.hi) != (0, 1):
                out.append(Violation("BadBinary", f"binary {v.name!r} must have bounds [0, 1]"))
        n = len(self.variables)
        labels = set()
        for i, c in enumerate(self.constraints):
            label = c.label or f"c{i}"
            if label in labels:
                out.append(Violation("DuplicateLabel", f"constraint label {label!r} used twice"))
            labels.add(label)
            seen = set()
            for var, _ in c.terms:
                if not 0 <= var < n:
                    out.append(Violation("UnknownVar", f"constraint {label!r} references unknown variable {var}"))
                elif var in seen:
                    out.append(Violation("DuplicateTerm", f"constraint {label!r} repeats variable {self.variables[var].name!r}"))
                seen.add(var)
        obj = self.objective
        if obj.sense is ObjectiveSense.FEASIBILITY and obj.terms:
            out.append(Violation("FeasibilityTerms", "feasibility objective must have no terms"))
        for var, _ in obj.terms:
            if not 0 <= var < n:
                out.append(Violation("UnknownVar", f"objective references unknown variable {var}"))
        return out

    def check(self) -> None:
        violations = self.validate()
        if violations:
            raise ValidationError(violations)

    # -- equality ignores the private name index --------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Model):
            return NotImplemented
        return (
            self.variables == other.variables
            and self.constraints == other.constraints
            and self.objective == other.objective
        )


def from_parts(
    variables: Sequence[Variable],
    constraints: Sequence[LinearConstraint],
    objective: Objective = Objective(),
) -> Model:
    """Assemble a model without per-call checks; call ``validate`` afterwards."""
    return Model(list(variables), list(constraints), objective)
