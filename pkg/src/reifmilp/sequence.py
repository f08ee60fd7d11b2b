"""State-sequence front-end: per-step transition kernels over states ``s_0..s_T``.

A kernel is any callable ``kernel(last_state, next_state, model)`` that appends
variables and rows to ``model`` and returns a list of ``ReifiedTerm``. The
built-in kernels ignore ``last_state``; it is passed so that kernels which
depend on the transition itself can be written against the same signature.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import Callable, Dict, List, Sequence, Tuple

from .errors import BadStep, InvalidSpec, UnknownKernel
from .model import Model, VarId
from .reify import CongruenceSpec, ReifiedTerm, reify_congruence, require

TransitionKernel = Callable[[VarId, VarId, Model], List[ReifiedTerm]]


@dataclass(frozen=True)
class SequenceSpec:
    length: int
    state_lo: int
    state_hi: int

    def __post_init__(self) -> None:
        if self.length < 1:
            raise InvalidSpec(f"sequence length must be >= 1, got {self.length}")
        if not 0 <= self.state_lo <= self.state_hi:
            raise InvalidSpec(f"need 0 <= lo <= hi, got [{self.state_lo}, {self.state_hi}]")


class Mode(enum.Enum):
    SOFT = "soft"
    REQUIRE = "require"


@dataclass(frozen=True)
class KernelApplication:
    step: int
    kernel: str
    mode: Mode = Mode.SOFT
    weight: int = 1


def build_sequence(model: Model, spec: SequenceSpec, prefix: str = "s") -> List[VarId]:
    return [model.add_int_var(f"{prefix}{t}", spec.state_lo, spec.state_hi) for t in range(spec.length + 1)]


def kernel_congruence(modulus: int, remainder: int) -> TransitionKernel:
    if modulus < 1 or not 0 <= remainder < modulus:
        raise InvalidSpec(f"bad congruence kernel ({modulus}, {remainder})")

    def kernel(last_state: VarId, next_state: VarId, model: Model) -> List[ReifiedTerm]:
        return [reify_congruence(model, CongruenceSpec(next_state, modulus, remainder), 1)]

    kernel.modulus = modulus  # type: ignore[attr-defined]
    kernel.remainder = remainder  # type: ignore[attr-defined]
    return kernel


def kernel_even() -> TransitionKernel:
    return kernel_congruence(2, 0)


def kernel_odd() -> TransitionKernel:
    return kernel_congruence(2, 1)


_CONGRUENCE_ID = re.compile(r"congruence:(-?\d+):(-?\d+)")


def parse_kernel_id(name: str) -> Tuple[int, int]:
    """Kernel id to ``(modulus, remainder)``: ``even``, ``odd`` or ``congruence:k:r``."""
    if name == "even":
        return 2, 0
    if name == "odd":
        return 2, 1
    m = _CONGRUENCE_ID.fullmatch(name)
    if m is None:
        raise UnknownKernel(f"unknown kernel {name!r}")
    k, r = int(m.group(1)), int(m.group(2))
    if k < 1 or not 0 <= r < k:
        raise InvalidSpec(f"bad congruence kernel {name!r}")
    return k, r


def resolve_kernel(name: str, registry: Dict[str, TransitionKernel] = None) -> TransitionKernel:
    if registry and name in registry:
        return registry[name]
    return kernel_congruence(*parse_kernel_id(name))


def apply_kernels(
    model: Model,
    states: Sequence[VarId],
    applications: Sequence[KernelApplication],
    registry: Dict[str, TransitionKernel] = None,
) -> List[ReifiedTerm]:
    """Run each application on ``(s_{t-1}, s_t)`` in order.

    Require-mode terms are hardened with ``require``; soft terms come back
    with their weight scaled by the application weight, ready for
    ``maximize_weighted``.
    """
    horizon = len(states) - 1
    soft: List[ReifiedTerm] = []
    for app in applications:
        if not 1 <= app.step <= horizon:
            raise BadStep(f"step {app.step} outside [1, {horizon}]")
        kernel = resolve_kernel(app.kernel, registry)
        terms = kernel(states[app.step - 1], states[app.step], model)
        for b, w in terms:
            term = ReifiedTerm(b, w * app.weight)
            if app.mode is Mode.REQUIRE:
                require(model, term)
            else:
                soft.append(term)
    return soft
