"""Binary finite-domain CSPs: homomorphism check and one-hot MILP encoding."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterator, List, Mapping, Optional, Sequence, Tuple

from .errors import InvalidSpec, NotOneHot, PartialMapping
from .model import Model, Sense, VarId

Pair = Tuple[int, int]


@dataclass(frozen=True)
class Domain:
    values: Tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.values:
            raise InvalidSpec("domain must be nonempty")
        if len(set(self.values)) != len(self.values):
            raise InvalidSpec(f"domain has duplicate values: {self.values}")

    def __len__(self) -> int:
        return len(self.values)

    def index(self, value: str) -> int:
        try:
            return self.values.index(value)
        except ValueError:
            raise InvalidSpec(f"{value!r} is not in the domain") from None


@dataclass(frozen=True)
class BinaryRelation:
    allowed: FrozenSet[Pair]

    def __contains__(self, pair: Pair) -> bool:
        return pair in self.allowed


@dataclass(frozen=True)
class CspConstraint:
    scope: Tuple[str, str]
    relation: BinaryRelation


@dataclass
class CspInstance:
    domain: Domain
    variables: List[str]
    constraints: List[CspConstraint] = field(default_factory=list)

    def __post_init__(self) -> None:
        if len(set(self.variables)) != len(self.variables):
            raise InvalidSpec("CSP variables must be distinct")
        declared = set(self.variables)
        size = len(self.domain)
        for c in self.constraints:
            for v in c.scope:
                if v not in declared:
                    raise InvalidSpec(f"constraint scope references undeclared variable {v!r}")
            for a, b in c.relation.allowed:
                if not (0 <= a < size and 0 <= b < size):
                    raise InvalidSpec(f"relation pair {(a, b)} outside the domain")

    def add(self, u: str, v: str, relation: BinaryRelation) -> None:
        self.constraints.append(CspConstraint((u, v), relation))
        self.__post_init__()


def neq_relation(domain: Domain) -> BinaryRelation:
    n = len(domain)
    return BinaryRelation(frozenset((a, b) for a in range(n) for b in range(n) if a != b))


def check_homomorphism(instance: CspInstance, mapping: Mapping[str, str]) -> bool:
    return not violated_constraints(instance, mapping)


def violated_constraints(instance: CspInstance, mapping: Mapping[str, str]) -> List[CspConstraint]:
    """Constraints whose scope image falls outside the allowed relation."""
    missing = [v for v in instance.variables if v not in mapping]
    if missing:
        raise PartialMapping(f"mapping has no value for {', '.join(missing)}")
    idx = {v: instance.domain.index(mapping[v]) for v in instance.variables}
    return [c for c in instance.constraints if (idx[c.scope[0]], idx[c.scope[1]]) not in c.relation]


def all_homomorphisms(instance: CspInstance) -> Iterator[Dict[str, str]]:
    """Every accepted mapping, by exhaustive enumeration in domain order."""
    for combo in itertools.product(instance.domain.values, repeat=len(instance.variables)):
        mapping = dict(zip(instance.variables, combo))
        if check_homomorphism(instance, mapping):
            yield mapping


@dataclass
class Codebook:
    """Bidirectional map between ``(variable, value)`` and one-hot binaries."""

    instance: CspInstance
    vars: Dict[Tuple[str, str], VarId]

    def block(self, variable: str) -> List[VarId]:
        return [self.vars[variable, d] for d in self.instance.domain.values]

    def members(self) -> FrozenSet[VarId]:
        return frozenset(self.vars.values())

    def lift(self, mapping: Mapping[str, str]) -> Dict[VarId, int]:
        return {vid: int(mapping.get(v) == d) for (v, d), vid in self.vars.items()}


def encode_csp(instance: CspInstance, model: Optional[Model] = None, prefix: str = "y") -> Tuple[Model, Codebook]:
    """One-hot encode ``instance`` into ``model`` (a fresh model by default).

    One binary ``y_<var>_<value>`` per pair, an exactly-one row per variable
    and, for every constraint, a cut ``y_u_a + y_v_b <= 1`` per forbidden
    pair ``(a, b)``.
    """
    model = Model() if model is None else model
    values = instance.domain.values
    ids: Dict[Tuple[str, str], VarId] = {}
    taken = {c.label for c in model.constraints}
    for v in instance.variables:
        for d in values:
            ids[v, d] = model.add_bool_var(model.unique_name(f"{prefix}_{v}_{d}"))
    for v in instance.variables:
        model.add_constraint([(ids[v, d], 1) for d in values], Sense.EQ, 1, label=_fresh(taken, f"onehot_{v}"))
    n = len(values)
    for u, v, rel in ((c.scope[0], c.scope[1], c.relation) for c in instance.constraints):
        for a in range(n):
            for b in range(n):
                if (a, b) in rel:
                    continue
                ya, yb = ids[u, values[a]], ids[v, values[b]]
                label = _fresh(taken, f"cut_{u}_{v}_{values[a]}_{values[b]}")
                if ya == yb:
                    # u == v and a == b: the single binary must be 0
                    model.add_constraint([(ya, 1)], Sense.LE, 0, label=label)
                else:
                    model.add_constraint([(ya, 1), (yb, 1)], Sense.LE, 1, label=label)
    return model, Codebook(instance, ids)


def _fresh(taken: set, base: str) -> str:
    label, i = base, 0
    while label in taken:
        i += 1
        label = f"{base}_{i}"
    taken.add(label)
    return label


def decode(codebook: Codebook, assignment: Mapping[VarId, int]) -> Dict[str, str]:
    out: Dict[str, str] = {}
    for v in codebook.instance.variables:
        hot = [d for d in codebook.instance.domain.values if assignment[codebook.vars[v, d]] == 1]
        if len(hot) != 1:
            raise NotOneHot(f"variable {v!r} has {len(hot)} hot values")
        out[v] = hot[0]
    return out


COLORS = ("Blue", "Red", "Green")

WORKED_EDGES = (
    ("x1", "x2"),
    ("x2", "x3"),
    ("x1", "x4"),
    ("x4", "x5"),
    ("x5", "x3"),
    ("x4", "x2"),
    ("x5", "x2"),
)


def graph_coloring(colors: Sequence[str], nodes: Sequence[str], edges: Sequence[Tuple[str, str]]) -> CspInstance:
    domain = Domain(tuple(colors))
    rel = neq_relation(domain)
    return CspInstance(domain, list(nodes), [CspConstraint((u, v), rel) for u, v in edges])


def worked_instance() -> CspInstance:
    """Five-node, seven-edge 3-coloring instance (three triangles sharing x2)."""
    return graph_coloring(COLORS, [f"x{i}" for i in range(1, 6)], WORKED_EDGES)
