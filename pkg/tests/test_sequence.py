import itertools
import random

import pytest

from reifmilp.errors import BadStep, InvalidSpec, UnknownKernel
from reifmilp.mip import enumerate_solutions, solve_mip
from reifmilp.model import Model, Sense
from reifmilp.oracle import brute_force, property_oracle_sequence
from reifmilp.reify import ReifiedTerm, maximize_weighted
from reifmilp.sequence import (
    KernelApplication,
    Mode,
    SequenceSpec,
    apply_kernels,
    build_sequence,
    kernel_congruence,
    kernel_even,
    kernel_odd,
    parse_kernel_id,
)


def chain(T, lo, hi):
    m = Model()
    return m, build_sequence(m, SequenceSpec(T, lo, hi))


def test_build_sequence_counts():
    m, s = chain(3, 0, 9)
    assert s == [0, 1, 2, 3] and [v.name for v in m.variables] == ["s0", "s1", "s2", "s3"]
    m, s = chain(1, 0, 0)
    assert len(s) == 2 and all(v.lo == v.hi == 0 for v in m.variables)
    m, s = chain(2, 0, 4)
    assert brute_force(m).feasible_count == 5**3 == 125


@pytest.mark.parametrize("args", [(0, 0, 1), (2, -1, 3), (2, 5, 4)])
def test_bad_sequence_spec(args):
    with pytest.raises(InvalidSpec):
        SequenceSpec(*args)


def test_kernel_even_structure():
    m, s = chain(1, 0, 10)
    terms = kernel_even()(s[0], s[1], m)
    assert terms == [ReifiedTerm(3, 1)]
    assert [(v.name, v.lo, v.hi) for v in m.variables[2:]] == [("n_even", 0, 5), ("b_even", 0, 1)]
    assert len(m.constraints) == 2


def test_kernel_ignores_last_state():
    a, sa = chain(1, 0, 10)
    b, sb = chain(1, 0, 10)
    kernel_odd()(sa[0], sa[1], a)
    kernel_odd()(sb[1], sb[1], b)
    assert a == b


def test_kernel_congruence_2_0_is_kernel_even():
    a, sa = chain(2, 0, 7)
    b, sb = chain(2, 0, 7)
    kernel_even()(sa[1], sa[2], a)
    kernel_congruence(2, 0)(sb[1], sb[2], b)
    assert a == b


@pytest.mark.parametrize(
    "kernel, expected",
    [("odd", [1, 3, 5, 7, 9]), ("congruence:3:0", [0, 3, 6, 9]), ("congruence:1:0", list(range(10)))],
)
def test_required_kernel_feasible_set(kernel, expected):
    m, s = chain(1, 0, 9)
    apply_kernels(m, s, [KernelApplication(1, kernel, Mode.REQUIRE)])
    assert sorted({a[s[1]] for a in enumerate_solutions(m)}) == expected


def test_even_on_zero_box():
    m, s = chain(1, 0, 0)
    apply_kernels(m, s, [KernelApplication(1, "even", Mode.REQUIRE)])
    assert solve_mip(m).status.value == "OPTIMAL"


def test_alternating_witness():
    m, s = chain(3, 0, 9)
    apps = [KernelApplication(1, "odd", Mode.REQUIRE), KernelApplication(2, "even", Mode.REQUIRE),
            KernelApplication(3, "odd", Mode.REQUIRE)]
    assert apply_kernels(m, s, apps) == []
    witness = next(a for a in enumerate_solutions(m, limit=1))
    assert [witness[v] for v in s] == [0, 1, 0, 1]


def test_two_even_steps_count():
    # s0 free (5 values), s1 and s2 in {0, 2, 4}
    expected = sum(1 for t in itertools.product(range(5), repeat=3) if t[1] % 2 == 0 and t[2] % 2 == 0)
    assert expected == 45
    m, s = chain(2, 0, 4)
    apply_kernels(m, s, [KernelApplication(1, "even", Mode.REQUIRE), KernelApplication(2, "even", Mode.REQUIRE)])
    assert len(enumerate_solutions(m)) == 45


def test_soft_even_odd_optimum():
    m, s = chain(1, 0, 9)
    apps = [KernelApplication(1, "even"), KernelApplication(1, "odd")]
    soft = apply_kernels(m, s, apps)
    maximize_weighted(m, soft)
    assert solve_mip(m).objective == 1 == property_oracle_sequence(SequenceSpec(1, 0, 9), apps)


def test_application_weight_scales_term():
    m, s = chain(1, 0, 3)
    [term] = apply_kernels(m, s, [KernelApplication(1, "even", Mode.SOFT, 5)])
    assert term.weight == 5


def test_bad_step_and_unknown_kernel():
    m, s = chain(2, 0, 3)
    with pytest.raises(BadStep):
        apply_kernels(m, s, [KernelApplication(3, "even")])
    with pytest.raises(BadStep):
        apply_kernels(m, s, [KernelApplication(0, "even")])
    with pytest.raises(UnknownKernel):
        apply_kernels(m, s, [KernelApplication(1, "prime")])
    with pytest.raises(InvalidSpec):
        parse_kernel_id("congruence:3:3")
    with pytest.raises(InvalidSpec):
        kernel_congruence(0, 0)


def test_custom_kernel_registry_uses_last_state():
    def nondecreasing(last, nxt, model):
        b = model.add_bool_var(model.unique_name("b_up"))
        # b = 1  ->  next - last >= 0, with M = state span
        model.add_constraint([(nxt, 1), (last, -1), (b, -3)], Sense.GE, -3)
        return [ReifiedTerm(b, 1)]

    m, s = chain(2, 0, 3)
    apply_kernels(m, s, [KernelApplication(1, "up", Mode.REQUIRE), KernelApplication(2, "up", Mode.REQUIRE)],
                  registry={"up": nondecreasing})
    sols = enumerate_solutions(m)
    assert {tuple(a[v] for v in s) for a in sols} == {t for t in itertools.product(range(4), repeat=3) if t[0] <= t[1] <= t[2]}


def test_kernels_only_append():
    m, s = chain(2, 0, 6)
    apply_kernels(m, s, [KernelApplication(1, "odd", Mode.REQUIRE)])
    vars_before, rows_before = list(m.variables), list(m.constraints)
    apply_kernels(m, s, [KernelApplication(2, "congruence:3:1"), KernelApplication(1, "even")])
    assert m.variables[: len(vars_before)] == vars_before
    assert m.constraints[: len(rows_before)] == rows_before


def _feasible_states(apps, spec):
    m = Model()
    s = build_sequence(m, spec)
    apply_kernels(m, s, apps)
    return {tuple(a[v] for v in s) for a in enumerate_solutions(m)}


@pytest.mark.parametrize("seed", range(8))
def test_require_order_does_not_change_feasible_set(seed):
    rng = random.Random(seed)
    spec = SequenceSpec(2, 0, 6)
    kinds = ["even", "odd", "congruence:3:0", "congruence:3:1", "congruence:1:0"]
    apps = [KernelApplication(rng.randint(1, 2), rng.choice(kinds), Mode.REQUIRE) for _ in range(3)]
    shuffled = apps[:]
    rng.shuffle(shuffled)
    assert _feasible_states(apps, spec) == _feasible_states(list(reversed(apps)), spec) == _feasible_states(shuffled, spec)
