"""LP relaxation and a bounded-variable primal simplex.

Dense tableau, two phases (artificial variables only on rows whose slack
cannot absorb the initial residual), Dantzig pricing that falls back to
Bland's rule after a run of degenerate pivots. Every variable in a relaxed
model has a finite box, so an unbounded ray can only mean numerical trouble.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .errors import NumericalFailure
from .model import Model, ObjectiveSense, Sense

FEAS_TOL = 1e-7
OPT_TOL = 1e-9
INT_TOL = 1e-6
BOUND_TOL = 1e-9
PIVOT_TOL = 1e-9
BLAND_AFTER = 50

_SENSE_CODE = {Sense.LE: -1, Sense.EQ: 0, Sense.GE: 1}


class LpStatus(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class LpProblem:
    """Continuous relaxation: rows ``A x (<=,=,>=) rhs`` over ``lo <= x <= hi``.

    ``senses`` holds -1 for <=, 0 for =, +1 for >=. ``cost`` is the objective
    as written; ``maximize`` says which way it is optimised.
    """

    A: np.ndarray
    senses: np.ndarray
    rhs: np.ndarray
    lo: np.ndarray
    hi: np.ndarray
    cost: np.ndarray
    maximize: bool = True

    @property
    def shape(self) -> Tuple[int, int]:
        return self.A.shape


@dataclass
class LpOutcome:
    status: LpStatus
    point: Optional[np.ndarray]
    objective: float
    iterations: int = 0


def relax(model: Model) -> LpProblem:
    n, m = model.num_vars, len(model.constraints)
    A = np.zeros((m, n))
    for i, c in enumerate(model.constraints):
        for var, coef in c.terms:
            A[i, var] = coef
    senses = np.array([_SENSE_CODE[c.sense] for c in model.constraints], dtype=int)
    rhs = np.array([c.rhs for c in model.constraints], dtype=float)
    lo = np.array([v.lo for v in model.variables], dtype=float)
    hi = np.array([v.hi for v in model.variables], dtype=float)
    cost = np.zeros(n)
    obj = model.objective
    if obj.sense is not ObjectiveSense.FEASIBILITY:
        for var, w in obj.terms:
            cost[var] += w
    return LpProblem(A, senses, rhs, lo, hi, cost, obj.sense is not ObjectiveSense.MINIMIZE)


def solve_lp(problem: LpProblem, lo: Optional[np.ndarray] = None, hi: Optional[np.ndarray] = None) -> LpOutcome:
    """Optimise ``problem``, optionally with the variable box replaced by ``lo``/``hi``."""
    lo = problem.lo if lo is None else np.asarray(lo, dtype=float)
    hi = problem.hi if hi is None else np.asarray(hi, dtype=float)
    if np.any(lo > hi):
        return LpOutcome(LpStatus.INFEASIBLE, None, float("nan"))
    return _Simplex(problem, lo, hi).run()


class _Simplex:
    def __init__(self, problem: LpProblem, lo: np.ndarray, hi: np.ndarray):
        self.problem = problem
        A, b = problem.A, problem.rhs
        m, n = A.shape
        self.m, self.n = m, n

        residual = b - A @ lo if m else np.zeros(0)
        senses = problem.senses
        slack_lo = np.where(senses == 1, -np.inf, 0.0)
        slack_hi = np.where(senses == -1, np.inf, 0.0)
        slack_ok = ((senses == -1) & (residual >= 0)) | ((senses == 1) & (residual <= 0)) | (
            (senses == 0) & (residual == 0)
        )
        art_rows = np.flatnonzero(~slack_ok)
        k = len(art_rows)
        sign = np.where(residual >= 0, 1.0, -1.0)

        art = np.zeros((m, k))
        art[art_rows, np.arange(k)] = sign[art_rows]
        # basis inverse is diag(+-1): slack rows keep +1, artificial rows use the residual sign
        scale = np.ones(m)
        scale[art_rows] = sign[art_rows]
        self.T = np.hstack([A, np.eye(m), art, b.reshape(-1, 1)]) * scale.reshape(-1, 1)
        self.N = n + m + k

        self.lo = np.concatenate([lo, slack_lo, np.zeros(k)])
        self.hi = np.concatenate([hi, slack_hi, np.full(k, np.inf)])
        self.x = np.concatenate([lo, np.zeros(m), np.zeros(k)])
        self.at_upper = np.zeros(self.N, dtype=bool)
        # >= slacks live in (-inf, 0] and start at their upper bound
        self.at_upper[n : n + m] = senses == 1

        self.basis = np.arange(n, n + m)
        self.basis[art_rows] = n + m + np.arange(k)
        self.is_basic = np.zeros(self.N, dtype=bool)
        self.is_basic[self.basis] = True
        self.art_start = n + m
        self.iterations = 0
        self.limit = 100 * (self.m + self.N) + 1000
        self._refresh_basics()

    def _refresh_basics(self) -> None:
        if self.m == 0:
            return
        nb = ~self.is_basic
        self.x[self.basis] = self.T[:, -1] - self.T[:, :-1][:, nb] @ self.x[nb]

    def _optimise(self, cost: np.ndarray) -> None:
        degenerate = 0
        while True:
            if self.iterations >= self.limit:
                raise NumericalFailure(f"simplex exceeded {self.limit} iterations")
            tab = self.T[:, :-1]
            d = cost - cost[self.basis] @ tab if self.m else cost.copy()
            movable = (~self.is_basic) & (self.hi - self.lo > 0)
            down = movable & self.at_upper & (d > OPT_TOL)
            up = movable & ~self.at_upper & (d < -OPT_TOL)
            eligible = up | down
            if not eligible.any():
                return
            if degenerate >= BLAND_AFTER:
                j = int(np.flatnonzero(eligible)[0])
            else:
                j = int(np.argmax(np.where(eligible, np.abs(d), -1.0)))
            direction = 1.0 if up[j] else -1.0

            alpha = direction * tab[:, j] if self.m else np.zeros(0)
            xb = self.x[self.basis]
            lb, ub = self.lo[self.basis], self.hi[self.basis]
            limits = np.full(self.m, np.inf)
            pos, neg = alpha > PIVOT_TOL, alpha < -PIVOT_TOL
            limits[pos] = (xb[pos] - lb[pos]) / alpha[pos]
            limits[neg] = (ub[neg] - xb[neg]) / -alpha[neg]
            np.maximum(limits, 0.0, out=limits)
            step_row = limits.min() if self.m else np.inf
            flip = self.hi[j] - self.lo[j]

            if flip <= step_row:
                if not np.isfinite(flip):
                    raise NumericalFailure("unbounded ray in a boxed problem")
                step = flip
                self.at_upper[j] = not self.at_upper[j]
                self.x[j] = self.hi[j] if self.at_upper[j] else self.lo[j]
            else:
                step = step_row
                ties = np.flatnonzero(limits <= step_row + 1e-12)
                if degenerate >= BLAND_AFTER:
                    r = int(ties[np.argmin(self.basis[ties])])
                else:
                    r = int(ties[np.argmax(np.abs(alpha[ties]))])
                leaving = self.basis[r]
                self._pivot(r, j)
                self.x[j] += direction * step
                if alpha[r] > 0:
                    self.x[leaving], self.at_upper[leaving] = self.lo[leaving], False
                else:
                    self.x[leaving], self.at_upper[leaving] = self.hi[leaving], True
                self.at_upper[j] = False
            self.iterations += 1
            degenerate = degenerate + 1 if step <= 1e-12 else 0
            self._refresh_basics()

    def _pivot(self, r: int, j: int) -> None:
        T = self.T
        T[r] /= T[r, j]
        col = T[:, j].copy()
        col[r] = 0.0
        T -= np.outer(col, T[r])
        T[:, j] = 0.0
        T[r, j] = 1.0
        leaving = self.basis[r]
        self.is_basic[leaving] = False
        self.is_basic[j] = True
        self.basis[r] = j

    def run(self) -> LpOutcome:
        problem = self.problem
        n = self.n
        if self.N > self.art_start:
            phase1 = np.zeros(self.N)
            phase1[self.art_start :] = 1.0
            self._optimise(phase1)
            if self.x[self.art_start :].sum() > FEAS_TOL:
                return LpOutcome(LpStatus.INFEASIBLE, None, float("nan"), self.iterations)
            self.hi[self.art_start :] = 0.0
            self.at_upper[self.art_start :] = False
            self._refresh_basics()

        cost = np.zeros(self.N)
        cost[:n] = -problem.cost if problem.maximize else problem.cost
        self._optimise(cost)

        point = np.clip(self.x[:n], self.lo[:n], self.hi[:n])
        if self.m:
            act = problem.A @ point
            gap = act - problem.rhs
            bad = ((problem.senses <= 0) & (gap > FEAS_TOL)) | ((problem.senses >= 0) & (gap < -FEAS_TOL))
            if bad.any():
                raise NumericalFailure(f"LP point violates rows {np.flatnonzero(bad).tolist()} beyond tolerance")
        return LpOutcome(LpStatus.OPTIMAL, point, float(problem.cost @ point), self.iterations)
