import itertools
import random
from pathlib import Path

import numpy as np
import pytest

from reifmilp.csp import BinaryRelation, CspConstraint, CspInstance, Domain
from reifmilp.model import Model, ObjectiveSense, Sense

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures() -> Path:
    return FIXTURES


def random_model(seed: int, max_vars: int = 5, max_bound: int = 6, max_rows: int = 10) -> Model:
    """Small integer model; about three in four have a planted feasible point."""
    rng = random.Random(seed)
    m = Model()
    n = rng.randint(1, max_vars)
    for i in range(n):
        lo = rng.randint(0, max_bound)
        m.add_int_var(f"v{i}", lo, rng.randint(lo, max_bound))
    planted = [rng.randint(v.lo, v.hi) for v in m.variables]
    plant = rng.random() < 0.75
    for _ in range(rng.randint(0, max_rows)):
        scope = rng.sample(range(n), rng.randint(1, n))
        terms = [(v, rng.choice([-4, -3, -2, -1, 1, 2, 3, 4])) for v in scope]
        sense = rng.choice(list(Sense))
        if plant:
            act = sum(a * planted[v] for v, a in terms)
            slack = 0 if sense is Sense.EQ else rng.randint(0, 4)
            rhs = act + slack if sense is Sense.LE else act - slack
        else:
            rhs = rng.randint(-10, 15)
        m.add_constraint(terms, sense, rhs)
    sense = rng.choice([ObjectiveSense.MAXIMIZE, ObjectiveSense.MINIMIZE, ObjectiveSense.MAXIMIZE, ObjectiveSense.FEASIBILITY])
    m.set_objective(sense, [(v, rng.randint(-3, 3)) for v in range(n)])
    return m


def random_csp(seed: int, max_vars: int = 5, max_domain: int = 4, max_constraints: int = 7) -> CspInstance:
    rng = random.Random(seed)
    size = rng.randint(1, max_domain)
    domain = Domain(tuple(f"d{i}" for i in range(size)))
    names = [f"v{i}" for i in range(rng.randint(1, max_vars))]
    pairs = list(itertools.product(range(size), repeat=2))
    constraints = []
    for _ in range(rng.randint(0, max_constraints)):
        u, v = rng.choice(names), rng.choice(names)
        density = rng.random()
        allowed = frozenset(p for p in pairs if rng.random() < density)
        constraints.append(CspConstraint((u, v), BinaryRelation(allowed)))
    return CspInstance(domain, names, constraints)


def random_lp(seed: int, max_vars: int = 6, max_rows: int = 10):
    """Feasible boxed LP as dense arrays: (A, senses, rhs, lo, hi, cost, maximize)."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, max_vars + 1))
    m = int(rng.integers(1, max_rows + 1))
    A = rng.integers(-5, 6, size=(m, n)).astype(float)
    lo = rng.integers(0, 4, size=n).astype(float)
    hi = lo + rng.integers(0, 7, size=n)
    x0 = lo + (hi - lo) * rng.random(n)
    senses = rng.integers(-1, 2, size=m)
    act = A @ x0
    # round outward so x0 stays feasible; equalities keep x0 exactly
    rhs = np.where(senses == -1, np.ceil(act), np.where(senses == 1, np.floor(act), act))
    cost = rng.integers(-3, 4, size=n).astype(float)
    return A, senses, rhs, lo, hi, cost, bool(rng.integers(0, 2))


def vertex_enumeration(A, senses, rhs, lo, hi, cost, maximize, tol=1e-7):
    """Best objective over basic feasible points, or None if there are none.

    Every vertex of a boxed polytope is the unique solution of n linearly
    independent active constraints drawn from the rows and the bounds, so it
    is enough to solve every n-subset and keep the feasible solutions.
    """
    m, n = A.shape
    eye = np.eye(n)
    planes = [(A[i], rhs[i]) for i in range(m)]
    planes += [(eye[j], lo[j]) for j in range(n)] + [(eye[j], hi[j]) for j in range(n)]
    P = np.array([p for p, _ in planes])
    q = np.array([b for _, b in planes])
    combos = np.array(list(itertools.combinations(range(len(planes)), n)))
    M = P[combos]
    rhs_c = q[combos]
    det = np.linalg.det(M)
    ok = np.abs(det) > 1e-9
    X = np.linalg.solve(M[ok], rhs_c[ok][..., None])[..., 0]
    act = X @ A.T
    feasible = np.all(X >= lo - tol, axis=1) & np.all(X <= hi + tol, axis=1)
    feasible &= np.all((act <= rhs + tol) | (senses != -1), axis=1)
    feasible &= np.all((act >= rhs - tol) | (senses != 1), axis=1)
    feasible &= np.all((np.abs(act - rhs) <= tol) | (senses != 0), axis=1)
    if not feasible.any():
        return None
    values = X[feasible] @ cost
    return float(values.max() if maximize else values.min())


_ACCEPTANCE: dict = {}


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("acceptance")
    if marker is None or call.when != "call":
        return
    number, title = marker.args
    ok = call.excinfo is None
    note = "" if ok else f" ({call.excinfo.typename}: {str(call.excinfo.value).splitlines()[0][:100]})"
    _ACCEPTANCE[number] = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}  {title}{note}"


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        terminalreporter.write_line(_ACCEPTANCE[number])
