"""Big-M reification of congruences ``x = r (mod k)`` and indicator combinators.

A congruence is linearised with an auxiliary integer ``n`` as ``x - k*n - r = 0``.
Half-reifying it on an indicator ``b`` gives the pair of rows

    x - k*n - r <=  M*(1 - b)
    x - k*n - r >= -M*(1 - b)

which are stored with the big-M term moved to the left-hand side. ``n`` is
bounded by ``floor((hi(x) - r) / k)`` and ``M`` is the smallest value that
keeps both rows slack for every ``x`` in its box when ``b = 0``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence, Tuple

from .errors import BadK, InvalidSpec, NotBinary, UnknownVar
from .model import Model, ObjectiveSense, Sense, VarId, VarKind


class ReifiedTerm(NamedTuple):
    indicator: VarId
    weight: int = 1


@dataclass(frozen=True)
class CongruenceSpec:
    target: VarId
    modulus: int
    remainder: int

    def check(self, model: Model) -> None:
        if not 0 <= self.target < model.num_vars:
            raise InvalidSpec(f"unknown target variable {self.target}")
        var = model.variables[self.target]
        if var.kind is not VarKind.INTEGER:
            raise InvalidSpec(f"congruence target {var.name!r} must be an integer variable")
        if var.lo < 0:
            raise InvalidSpec(f"congruence target {var.name!r} needs lo >= 0, got {var.lo}")
        if self.modulus < 1:
            raise InvalidSpec(f"modulus must be >= 1, got {self.modulus}")
        if not 0 <= self.remainder < self.modulus:
            raise InvalidSpec(f"remainder must lie in [0, {self.modulus}), got {self.remainder}")


def aux_upper_bound(hi: int, modulus: int, remainder: int) -> int:
    return max((hi - remainder) // modulus, 0)


def compute_big_m(lo: int, hi: int, modulus: int, remainder: int, n_hi: int) -> int:
    """Smallest M with ``|x - k*n - r| <= M`` over ``x in [lo, hi]``, ``n in [0, n_hi]``."""
    return max(hi - remainder, modulus * n_hi + remainder - lo, 0)


def _suffix(modulus: int, remainder: int) -> str:
    if modulus == 2:
        return "even" if remainder == 0 else "odd"
    return f"mod{modulus}r{remainder}"


def reify_congruence(
    model: Model,
    spec: CongruenceSpec,
    weight: int = 1,
    tag: Optional[str] = None,
) -> ReifiedTerm:
    """Half-reify ``target = remainder (mod modulus)`` on a fresh indicator.

    Adds one auxiliary integer, one binary and two rows. With the indicator at
    1 the congruence holds; at 0 the rows are slack for every target value.
    ``tag`` overrides the name suffix (default ``even``/``odd``/``mod<k>r<r>``).
    """
    spec.check(model)
    x = model.variables[spec.target]
    k, r = spec.modulus, spec.remainder
    n_hi = aux_upper_bound(x.hi, k, r)
    big_m = compute_big_m(x.lo, x.hi, k, r, n_hi)

    suffix = tag or _suffix(k, r)
    n = model.add_int_var(model.unique_name(f"n_{suffix}"), 0, n_hi)
    b = model.add_bool_var(model.unique_name(f"b_{suffix}"))

    # x - k n - r <= M (1 - b)   ->   x - k n + M b <= M + r
    model.add_constraint([(x.id, 1), (n, -k), (b, big_m)], Sense.LE, big_m + r)
    # x - k n - r >= -M (1 - b)  ->   x - k n - M b >= r - M
    model.add_constraint([(x.id, 1), (n, -k), (b, -big_m)], Sense.GE, r - big_m)
    return ReifiedTerm(b, weight)


def _require_binary(model: Model, var: VarId) -> None:
    if not 0 <= var < model.num_vars:
        raise UnknownVar(f"unknown indicator {var}")
    if model.variables[var].kind is not VarKind.BINARY:
        raise NotBinary(f"{model.variables[var].name!r} is not binary")


def require(model: Model, term: ReifiedTerm) -> None:
    if not 0 <= term.indicator < model.num_vars:
        raise UnknownVar(f"unknown indicator {term.indicator}")
    model.add_constraint([(term.indicator, 1)], Sense.EQ, 1)


def complement_pair(model: Model, x: VarId) -> Tuple[ReifiedTerm, ReifiedTerm]:
    """Even and odd half-reifications on ``x`` tied by ``b_even + b_odd = 1``.

    Every integer has exactly one parity, so the coupling turns the two
    one-way links into a full reification of evenness.
    """
    even = reify_congruence(model, CongruenceSpec(x, 2, 0))
    odd = reify_congruence(model, CongruenceSpec(x, 2, 1))
    model.add_constraint([(even.indicator, 1), (odd.indicator, 1)], Sense.EQ, 1)
    return even, odd


class Cardinality(enum.Enum):
    AT_LEAST = "atleast"
    AT_MOST = "atmost"
    EXACTLY = "exactly"


_CARD_SENSE = {
    Cardinality.AT_LEAST: Sense.GE,
    Cardinality.AT_MOST: Sense.LE,
    Cardinality.EXACTLY: Sense.EQ,
}


def cardinality(model: Model, indicators: Sequence[VarId], sense: Cardinality, k: int) -> int:
    for b in indicators:
        _require_binary(model, b)
    if not 0 <= k <= len(indicators):
        raise BadK(f"k={k} outside [0, {len(indicators)}]")
    return model.add_constraint([(b, 1) for b in indicators], _CARD_SENSE[sense], k)


def maximize_weighted(model: Model, terms: Sequence[ReifiedTerm]) -> None:
    """Objective ``max sum(weight * indicator)``; an empty list means feasibility."""
    if not terms:
        model.set_objective(ObjectiveSense.FEASIBILITY)
        return
    weights: dict = {}
    for b, w in terms:
        _require_binary(model, b)
        weights[b] = weights.get(b, 0) + w
    model.set_objective(ObjectiveSense.MAXIMIZE, list(weights.items()))

