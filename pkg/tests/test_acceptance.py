"""Exit criteria for the package, each checked at its tolerance and time bound.

A PASS/FAIL line per criterion is printed in the terminal summary.
"""

import itertools
import random
import time
from contextlib import contextmanager

import pytest

from reifmilp.cli import main
from reifmilp.csp import COLORS, all_homomorphisms, check_homomorphism, decode, encode_csp, worked_instance
from reifmilp.lp import LpProblem, LpStatus, relax, solve_lp
from reifmilp.lpformat import write_lp
from reifmilp.mip import MipStatus, enumerate_solutions, solve_mip
from reifmilp.model import Model, ObjectiveSense, Sense, VarKind
from reifmilp.modelfile import parse_model, parse_text, print_model
from reifmilp.oracle import brute_force, property_oracle_sequence
from reifmilp.reify import CongruenceSpec, ReifiedTerm, complement_pair, maximize_weighted, reify_congruence, require
from reifmilp.sequence import KernelApplication, Mode, SequenceSpec, apply_kernels, build_sequence, kernel_even, kernel_odd

from conftest import FIXTURES, random_csp, random_lp, random_model, vertex_enumeration

LP_TOL = 1e-6


@contextmanager
def within(seconds):
    start = time.perf_counter()
    yield
    elapsed = time.perf_counter() - start
    assert elapsed < seconds, f"took {elapsed:.2f}s, bound is {seconds}s"


def criterion_7_models():
    return [random_model(seed, max_vars=5, max_bound=6, max_rows=10) for seed in range(500)]


@pytest.mark.acceptance(1, "kernel structure for even and odd")
def test_kernel_structure():
    with within(1):
        for kernel, n_hi, M, offset in ((kernel_even(), 5, 10, 0), (kernel_odd(), 4, 9, 1)):
            m = Model()
            last, x = m.add_int_var("s0", 0, 10), m.add_int_var("x", 0, 10)
            terms = kernel(last, x, m)
            assert m.num_vars == 4 and len(m.constraints) == 2
            n, b = m.variables[2], m.variables[3]
            assert (n.kind, n.lo, n.hi) == (VarKind.INTEGER, 0, n_hi)
            assert (b.kind, b.lo, b.hi) == (VarKind.BINARY, 0, 1)
            assert terms == [ReifiedTerm(b.id, 1)]
            # x - 2n - offset <= M(1 - b)   and   x - 2n - offset >= -M(1 - b)
            ub, lb = m.constraints
            assert (ub.terms, ub.sense, ub.rhs) == (((x, 1), (n.id, -2), (b.id, M)), Sense.LE, M + offset)
            assert (lb.terms, lb.sense, lb.rhs) == (((x, 1), (n.id, -2), (b.id, -M)), Sense.GE, offset - M)
            # M covers the worst residual over the box
            assert M == max(abs(v - 2 * k - offset) for v in range(11) for k in range(n_hi + 1))


@pytest.mark.acceptance(2, "full parity reification on fixed x in [0, 20]")
def test_parity_oracle():
    with within(2):
        for value in range(21):
            m = Model()
            x = m.add_int_var("x", value, value)
            even, odd = complement_pair(m, x)
            res = solve_mip(m)
            assert res.status is MipStatus.OPTIMAL
            assert (res.best[even.indicator], res.best[odd.indicator]) == (int(value % 2 == 0), int(value % 2 == 1))


@pytest.mark.acceptance(3, "require-mode feasible sets")
def test_require_sets():
    with within(1):
        for hi, k, r in ((10, 2, 0), (10, 2, 1), (9, 3, 2)):
            m = Model()
            x = m.add_int_var("x", 0, hi)
            require(m, reify_congruence(m, CongruenceSpec(x, k, r)))
            expected = {v for v in range(hi + 1) if v % k == r}
            assert {a[x] for a in enumerate_solutions(m)} == expected
            assert {a[x] for a in brute_force(m, collect=True).enumerated} == expected
        assert expected == {2, 5, 8}


@pytest.mark.acceptance(4, "un-required reifications never shrink the box")
def test_big_m_inactivity():
    rng = random.Random(4)
    with within(10):
        for _ in range(100):
            k = rng.randint(1, 5)
            r = rng.randint(0, k - 1)
            lo = rng.randint(0, 30)
            hi = rng.randint(lo, 30)
            m = Model()
            x = m.add_int_var("x", lo, hi)
            reify_congruence(m, CongruenceSpec(x, k, r))
            projection = {a[x] for a in brute_force(m, collect=True).enumerated}
            assert projection == set(range(lo, hi + 1)), (lo, hi, k, r)


@pytest.mark.acceptance(5, "worked 3-coloring instance")
def test_worked_coloring(capsys):
    with within(1):
        code = main(["check", str(FIXTURES / "worked_coloring.model"), str(FIXTURES / "worked_solution.json")])
        capsys.readouterr()
        assert code == 0

        inst = worked_instance()
        model, book = encode_csp(inst)
        sols = [decode(book, s) for s in enumerate_solutions(model)]
        assert len(sols) == 6
        triangles = [("x1", "x2", "x4"), ("x2", "x3", "x5"), ("x2", "x4", "x5")]
        for s in sols:
            assert check_homomorphism(inst, s)
            assert all(len({s[v] for v in tri}) == 3 for tri in triangles)
        heads = [(s["x1"], s["x2"]) for s in sols]
        assert len(set(heads)) == 6
        assert set(heads) == {(a, b) for a, b in itertools.product(COLORS, repeat=2) if a != b}


@pytest.mark.acceptance(6, "CSP encoding equals homomorphism set on 50 instances")
def test_csp_equivalence():
    with within(30):
        for seed in range(50):
            inst = random_csp(1000 + seed, max_vars=5, max_domain=4, max_constraints=7)
            model, book = encode_csp(inst)
            decoded = [decode(book, s) for s in enumerate_solutions(model, guard=2**20)]
            got = {tuple(sorted(d.items())) for d in decoded}
            assert len(got) == len(decoded)
            brute = {
                tuple(sorted(zip(inst.variables, combo)))
                for combo in itertools.product(inst.domain.values, repeat=len(inst.variables))
                if check_homomorphism(inst, dict(zip(inst.variables, combo)))
            }
            assert got == brute
            assert brute == {tuple(sorted(h.items())) for h in all_homomorphisms(inst)}


@pytest.mark.acceptance(7, "branch-and-bound matches brute force on 500 models")
def test_milp_vs_oracle():
    mismatches = []
    with within(60):
        for seed, m in enumerate(criterion_7_models()):
            report = brute_force(m)
            res = solve_mip(m)
            if report.feasible_count == 0:
                ok = res.status is MipStatus.INFEASIBLE
            else:
                ok = res.status is MipStatus.OPTIMAL and m.is_feasible(res.best)
                if report.optimum is not None:
                    ok = ok and res.objective == report.optimum
            if not ok:
                mismatches.append(seed)
    assert mismatches == []


@pytest.mark.acceptance(8, "soft objective equals property oracle on 50 sequences")
def test_soft_semantics():
    rng = random.Random(8)
    kinds = ["even", "odd"] + [f"congruence:{k}:{r}" for k in range(1, 6) for r in range(k)]
    with within(30):
        for _ in range(50):
            T = rng.randint(1, 3)
            lo = rng.randint(0, 9)
            spec = SequenceSpec(T, lo, rng.randint(lo, 9))
            apps = [KernelApplication(rng.randint(1, T), rng.choice(kinds), Mode.SOFT, rng.randint(1, 5))
                    for _ in range(rng.randint(0, 4))]
            m = Model()
            states = build_sequence(m, spec)
            maximize_weighted(m, apply_kernels(m, states, apps))
            assert solve_mip(m).objective == property_oracle_sequence(spec, apps)


@pytest.mark.acceptance(9, "LP layer matches vertex enumeration and bounds the integer optimum")
def test_lp_layer():
    with within(30):
        for seed in range(50):
            args = random_lp(900 + seed, max_vars=6, max_rows=10)
            out = solve_lp(LpProblem(*args))
            expected = vertex_enumeration(*args)
            assert out.status is LpStatus.OPTIMAL
            assert abs(out.objective - expected) <= LP_TOL
        for m in criterion_7_models():
            report = brute_force(m)
            if report.optimum is None:
                continue
            out = solve_lp(relax(m))
            assert out.status is LpStatus.OPTIMAL
            if m.objective.sense is ObjectiveSense.MAXIMIZE:
                assert out.objective >= report.optimum - LP_TOL
            else:
                assert out.objective <= report.optimum + LP_TOL


@pytest.mark.acceptance(10, "deterministic export, round-trip and exit codes")
def test_formats(capsys):
    fixtures = [p for p in sorted(FIXTURES.glob("*.model")) if p.name not in {"parse_error.model", "duplicate_var.model"}]
    for path in fixtures:
        runs = []
        for _ in range(2):
            assert main(["encode", str(path)]) == 0
            runs.append(capsys.readouterr().out.encode())
        assert runs[0] == runs[1] == write_lp(parse_model(path).model).encode()
        model = parse_model(path).model
        assert parse_text(print_model(model)).model == model
    assert main(["solve", str(FIXTURES / "even_x.model")]) == 0
    assert main(["solve", str(FIXTURES / "infeasible.model")]) == 2
    assert main(["solve", str(FIXTURES / "parse_error.model")]) == 1
    capsys.readouterr()
    assert len(fixtures) >= 8
