"""Dense two-phase primal simplex (Bland's rule) for small linear programs.

Problems are stated as ``maximize c @ v`` subject to row constraints
``row @ v (<=|>=|=) rhs`` and per-variable bounds. Internally every variable
is shifted/split to be nonnegative, rows are sign-normalized so ``rhs >= 0``,
and slack, surplus and artificial columns are appended.
"""

from __future__ import annotations

import enum
import math
import os
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import lu_factor, lu_solve

PIVOT_TOL = 1e-10
FEAS_TOL = 1e-9
CHECK_TOL = 1e-7
DEFAULT_MARGIN_THRESHOLD = 1e-9


def margin_threshold() -> float:
    """Smallest margin counted as feasible; ``PFSYN_LP_TOL`` overrides it."""
    raw = os.environ.get("PFSYN_LP_TOL")
    if raw is None or raw.strip() == "":
        return DEFAULT_MARGIN_THRESHOLD
    value = float(raw)
    if not value >= 0:
        raise ValueError("PFSYN_LP_TOL must be a nonnegative number")
    return value


class Status(str, enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    ITERATION_LIMIT = "iteration_limit"


RELATIONS = ("<=", ">=", "=")


@dataclass
class LpProblem:
    num_vars: int
    objective: np.ndarray
    rows: list = field(default_factory=list)
    relations: list = field(default_factory=list)
    rhs: list = field(default_factory=list)
    lower: np.ndarray = None
    upper: np.ndarray = None

    def __post_init__(self):
        self.objective = np.asarray(self.objective, dtype=float).reshape(-1)
        if self.objective.size != self.num_vars:
            raise ValueError("objective length must equal num_vars")
        self.lower = np.zeros(self.num_vars) if self.lower is None else np.asarray(self.lower, dtype=float).copy()
        self.upper = np.full(self.num_vars, np.inf) if self.upper is None else np.asarray(self.upper, dtype=float).copy()
        if self.lower.shape != (self.num_vars,) or self.upper.shape != (self.num_vars,):
            raise ValueError("bounds must have length num_vars")
        rows, relations, rhs = self.rows, self.relations, self.rhs
        self.rows, self.relations, self.rhs = [], [], []
        for row, rel, b in zip(rows, relations, rhs):
            self.add(row, rel, b)

    def add(self, row, relation: str, rhs: float) -> None:
        row = np.asarray(row, dtype=float).reshape(-1)
        if row.size != self.num_vars:
            raise ValueError(f"constraint row has length {row.size}, expected {self.num_vars}")
        if relation not in RELATIONS:
            raise ValueError(f"unknown relation {relation!r}")
        if not (np.all(np.isfinite(row)) and math.isfinite(rhs)):
            raise ValueError("constraint coefficients must be finite")
        self.rows.append(row)
        self.relations.append(relation)
        self.rhs.append(float(rhs))

    def set_bounds(self, index, lower=None, upper=None) -> None:
        if lower is not None:
            self.lower[index] = lower
        if upper is not None:
            self.upper[index] = upper


@dataclass
class LpSolution:
    status: Status
    values: np.ndarray | None = None
    objective_value: float = math.nan
    iterations: int = 0

    @property
    def optimal(self) -> bool:
        return self.status is Status.OPTIMAL


@dataclass
class PointCheck:
    residuals: np.ndarray  # positive = amount of violation, per row
    bound_residuals: np.ndarray
    tol: float

    @property
    def satisfied(self) -> bool:
        return bool(np.all(self.residuals <= self.tol) and np.all(self.bound_residuals <= self.tol))

    @property
    def worst(self) -> float:
        both = np.concatenate([self.residuals, self.bound_residuals, [-np.inf]])
        return float(both.max())


def check_point(problem: LpProblem, v, tol: float = CHECK_TOL) -> PointCheck:
    """Per-constraint violation amounts of ``v`` (<= 0 means satisfied)."""
    v = np.asarray(v, dtype=float).reshape(-1)
    if v.size != problem.num_vars:
        raise ValueError(f"point has length {v.size}, expected {problem.num_vars}")
    res = np.empty(len(problem.rows))
    for k, (row, rel, b) in enumerate(zip(problem.rows, problem.relations, problem.rhs)):
        lhs = float(row @ v)
        if rel == "<=":
            res[k] = lhs - b
        elif rel == ">=":
            res[k] = b - lhs
        else:
            res[k] = abs(lhs - b)
    with np.errstate(invalid="ignore"):
        bres = np.maximum(np.nan_to_num(problem.lower - v, nan=-np.inf), np.nan_to_num(v - problem.upper, nan=-np.inf))
    return PointCheck(res, bres, tol)


# ----------------------------------------------------------------- solver


def _standard_form(problem: LpProblem):
    """Rewrite as max c@y, A y (rel) b, y >= 0 and return the back-map.

    ``v = offset + T @ y`` recovers the original variables.
    """
    n = problem.num_vars
    cols = []  # (original index, sign)
    offset = np.zeros(n)
    extra_rows = []  # finite upper bound on a shifted variable
    for j in range(n):
        lo, up = problem.lower[j], problem.upper[j]
        if lo > up:
            return None
        if math.isfinite(lo):
            offset[j] = lo
            cols.append((j, 1.0))
            if math.isfinite(up):
                extra_rows.append((len(cols) - 1, up - lo))
        elif math.isfinite(up):
            offset[j] = up
            cols.append((j, -1.0))
        else:
            cols.append((j, 1.0))
            cols.append((j, -1.0))
    T = np.zeros((n, len(cols)))
    for k, (j, s) in enumerate(cols):
        T[j, k] = s
    A_rows, rels, b = [], [], []
    for row, rel, rhs in zip(problem.rows, problem.relations, problem.rhs):
        A_rows.append(row @ T)
        rels.append(rel)
        b.append(rhs - row @ offset)
    for k, width in extra_rows:
        e = np.zeros(len(cols))
        e[k] = 1.0
        A_rows.append(e)
        rels.append("<=")
        b.append(width)
    A = np.array(A_rows).reshape(len(A_rows), len(cols))
    return problem.objective @ T, A, rels, np.array(b), T, offset, problem.objective @ offset


def _tableau(F, b, basis):
    """Current tableau rows ``B^-1 F`` and basic values ``B^-1 b``, recomputed from the original data."""
    lu = lu_factor(F[:, basis], check_finite=False)
    out = lu_solve(lu, np.column_stack([F, b]), check_finite=False)
    return out[:, :-1], out[:, -1]


def _run(F, b, cost, basis, allowed, max_iter, iters):
    """Maximize ``cost @ y`` from a feasible basis with Bland's rule.

    The tableau is rebuilt from ``F`` at every step instead of being updated
    in place, so roundoff cannot accumulate into spurious pivot candidates.
    Returns ("optimal" | "unbounded" | "limit", iterations used).
    """
    while True:
        tab, xb = _tableau(F, b, basis)
        reduced = cost - cost[basis] @ tab
        in_basis = set(basis)
        entering = next((j for j in allowed if j not in in_basis and reduced[j] > PIVOT_TOL), None)
        if entering is None:
            return "optimal", iters
        if iters >= max_iter:
            return "limit", iters
        col = tab[:, entering]
        xb = np.maximum(xb, 0.0)
        best, leave = math.inf, None
        for i in np.flatnonzero(col > PIVOT_TOL):
            ratio = xb[i] / col[i]
            if ratio < best - 1e-12 or (ratio <= best + 1e-12 and basis[i] < basis[leave]):
                best, leave = ratio, i
        if leave is None:
            return "unbounded", iters
        basis[leave] = entering
        iters += 1


def solve(problem: LpProblem, max_iter: int | None = None) -> LpSolution:
    sf = _standard_form(problem)
    if sf is None:
        return LpSolution(Status.INFEASIBLE)
    c, A, rels, b, T, offset, _ = sf
    m, ny = A.shape
    if max_iter is None:
        max_iter = 10 * (problem.num_vars + len(problem.rows)) ** 2
        max_iter = max(max_iter, 10 * (ny + m) ** 2)
    if m == 0:
        if np.any(c > 0):
            return LpSolution(Status.UNBOUNDED)
        values = offset.copy()
        return LpSolution(Status.OPTIMAL, values, float(problem.objective @ values))

    rels = list(rels)
    for i in range(m):
        if b[i] < 0:
            A[i] *= -1
            b[i] *= -1
            rels[i] = {"<=": ">=", ">=": "<=", "=": "="}[rels[i]]

    n_slack = sum(rel != "=" for rel in rels)
    n_art = sum(rel != "<=" for rel in rels)
    first_art = ny + n_slack
    width = first_art + n_art
    F = np.zeros((m, width))
    F[:, :ny] = A
    basis = [0] * m
    s, a = ny, first_art
    for i, rel in enumerate(rels):
        if rel != "=":
            F[i, s] = 1.0 if rel == "<=" else -1.0
            if rel == "<=":
                basis[i] = s
            s += 1
        if rel != "<=":
            F[i, a] = 1.0
            basis[i] = a
            a += 1

    iters = 0
    if n_art:
        cost = np.zeros(width)
        cost[first_art:] = -1.0
        state, iters = _run(F, b, cost, basis, range(width), max_iter, iters)
        if state == "limit":
            return LpSolution(Status.ITERATION_LIMIT, iterations=iters)
        tab, xb = _tableau(F, b, basis)
        if cost[basis] @ xb < -FEAS_TOL * max(1.0, float(b.max())):
            return LpSolution(Status.INFEASIBLE, iterations=iters)
        # drive zero-level artificials out of the basis; rows with no
        # replacement column are linear combinations of the others
        drop = []
        for i in range(m):
            if basis[i] >= first_art:
                in_basis = set(basis)
                cand = next((j for j in range(first_art) if j not in in_basis and abs(tab[i, j]) > PIVOT_TOL), None)
                if cand is None:
                    drop.append(i)
                else:
                    basis[i] = cand
                    tab, xb = _tableau(F, b, basis)
        if drop:
            keep = [i for i in range(m) if i not in drop]
            F, b = F[keep], b[keep]
            basis = [basis[i] for i in keep]
        F = F[:, :first_art]
        if not basis:
            if np.any(c > PIVOT_TOL):
                return LpSolution(Status.UNBOUNDED, iterations=iters)
            return _finish(problem, np.zeros(first_art), T, offset, ny, iters)

    cost = np.zeros(first_art)
    cost[:ny] = c
    state, iters = _run(F, b, cost, basis, range(first_art), max_iter, iters)
    if state == "limit":
        return LpSolution(Status.ITERATION_LIMIT, iterations=iters)
    if state == "unbounded":
        return LpSolution(Status.UNBOUNDED, iterations=iters)
    _, xb = _tableau(F, b, basis)
    y = np.zeros(first_art)
    y[basis] = np.maximum(xb, 0.0)
    return _finish(problem, y, T, offset, ny, iters)


def _finish(problem, y, T, offset, ny, iters):
    values = offset + T @ y[:ny]
    return LpSolution(Status.OPTIMAL, values, float(problem.objective @ values), iters)
