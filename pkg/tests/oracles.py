"""Independent reference computations used by the test suite.

Nothing here imports the package's solver or constraint builders.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np
from scipy.optimize import linprog


def _solve_exact(M, rhs):
    """Gauss-Jordan over the rationals; None if singular."""
    n = len(M)
    aug = [[Fraction(v) for v in row] + [Fraction(b)] for row, b in zip(M, rhs)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if piv is None:
            return None
        aug[col], aug[piv] = aug[piv], aug[col]
        p = aug[col][col]
        aug[col] = [v / p for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    return [aug[r][n] for r in range(n)]


def _feasible_exact(x, rows, rels, rhs):
    for row, rel, b in zip(rows, rels, rhs):
        lhs = sum(Fraction(int(a)) * v for a, v in zip(row, x))
        if rel == "<=" and lhs > b or rel == ">=" and lhs < b or rel == "=" and lhs != b:
            return False
    return all(v >= 0 for v in x)


def _best_vertex(c, rows, rels, rhs, must=()):
    """Max of c over the vertices of {x >= 0, rows}; rows in ``must`` always active.

    Candidate bases are screened in floating point, survivors are re-solved
    and re-checked exactly in rational arithmetic.
    Returns (found_any_vertex, best_value as Fraction or None).
    """
    rows = [list(map(int, r)) for r in rows]
    n = len(c)
    active_pool = [("row", k) for k in range(len(rows)) if k not in must] + [("var", j) for j in range(n)]
    k_free = n - len(must)
    if k_free < 0:
        return False, None
    A = np.array(rows, dtype=float).reshape(len(rows), n)
    b = np.array([float(v) for v in rhs])
    seen = set()
    best = None
    for combo in itertools.combinations(active_pool, k_free):
        picks = [("row", k) for k in must] + list(combo)
        M = np.zeros((n, n))
        r = np.zeros(n)
        for i, (kind, k) in enumerate(picks):
            if kind == "row":
                M[i], r[i] = A[k], b[k]
            else:
                M[i, k] = 1.0
        if abs(np.linalg.det(M)) < 1e-9:
            continue
        x = np.linalg.solve(M, r)
        if np.any(x < -1e-6):
            continue
        lhs = A @ x
        ok = True
        for k, rel in enumerate(rels):
            if rel == "<=" and lhs[k] > b[k] + 1e-6 or rel == ">=" and lhs[k] < b[k] - 1e-6 or rel == "=" and abs(lhs[k] - b[k]) > 1e-6:
                ok = False
                break
        if not ok:
            continue
        key = tuple(np.round(x, 7))
        if key in seen:
            continue
        seen.add(key)
        Mq = [[int(round(v)) for v in row] for row in M]
        xq = _solve_exact(Mq, [Fraction(v) for v in [rhs[k] if kind == "row" else 0 for kind, k in picks]])
        if xq is None or not _feasible_exact(xq, rows, rels, rhs):
            continue
        val = sum(Fraction(int(ci)) * v for ci, v in zip(c, xq))
        if best is None or val > best:
            best = val
    return best is not None, best


def vertex_enumeration_lp(c, rows, rels, rhs):
    """Exact status/optimum of ``max c@x, rows (rel) rhs, x >= 0`` (integer data).

    Returns ("optimal", Fraction) / ("infeasible", None) / ("unbounded", None).
    The feasible set is pointed (x >= 0), so it is empty iff it has no vertex,
    and the objective is unbounded iff some extreme ray d (normalized by
    sum(d) = 1) of the recession cone has c@d > 0.
    """
    feasible, best = _best_vertex(c, rows, rels, [Fraction(int(v)) for v in rhs])
    if not feasible:
        return "infeasible", None
    n = len(c)
    ray_rows = list(rows) + [[1] * n]
    ray_rels = list(rels) + ["="]
    ray_rhs = [Fraction(0)] * len(rows) + [Fraction(1)]
    has_ray, ray_best = _best_vertex(c, ray_rows, ray_rels, ray_rhs, must=(len(rows),))
    if has_ray and ray_best > 0:
        return "unbounded", None
    return "optimal", best


def two_by_two_radius(a) -> float:
    """Largest eigenvalue modulus of a 2x2 matrix from the characteristic polynomial."""
    (p, q), (r, s) = a
    tr, det = p + s, p * s - q * r
    disc = tr * tr - 4 * det
    if disc >= 0:
        root = math.sqrt(disc)
        return max(abs((tr + root) / 2), abs((tr - root) / 2))
    return math.sqrt(det)


def synthesis_margin_highs(A_plus, A_minus, B, positive_input=False):
    """Max-margin program for PDC synthesis, assembled from scratch and solved by HiGHS.

    Variables: p (n), xi[j][t] (m each), eps. Returns the optimal eps (or
    -inf when the program is infeasible).
    """
    r = len(A_plus)
    n = A_plus[0].shape[0]
    m = B[0].shape[1]
    nv = n + r * n * m + 1
    E = nv - 1

    def xi(j, t, c):
        return n + (j * n + t) * m + c

    A_ub, b_ub = [], []
    for i in range(r):
        for j in range(r):
            for h in range(n):
                row = np.zeros(nv)
                row[:n] = A_plus[i][h] - np.eye(n)[h]
                for t in range(n):
                    for c in range(m):
                        row[xi(j, t, c)] += B[i][h, c]
                row[E] = 1.0
                A_ub.append(row)
                b_ub.append(0.0)
            if positive_input:
                continue
            for h in range(n):
                for t in range(n):
                    row = np.zeros(nv)
                    row[t] = -A_minus[i][h, t]
                    for c in range(m):
                        row[xi(j, t, c)] = -B[i][h, c]
                    A_ub.append(row)
                    b_ub.append(0.0)
    for h in range(n):
        row = np.zeros(nv)
        row[h] = -1.0
        row[E] = 1.0
        A_ub.append(row)
        b_ub.append(0.0)
    bounds = [(0, 1)] * n + [((0 if positive_input else None), None)] * (r * n * m) + [(0, 1)]
    cost = np.zeros(nv)
    cost[E] = -1.0
    res = linprog(cost, A_ub=np.array(A_ub), b_ub=np.array(b_ub), bounds=bounds, method="highs")
    if res.status != 0:
        return -math.inf
    return -res.fun


def random_integer_lp(rng):
    """Small LP with integer data: (c, rows, rels, rhs) for max c@x, x >= 0."""
    n = int(rng.integers(1, 7))
    m = int(rng.integers(1, 13))
    rows = rng.integers(-5, 6, size=(m, n))
    rels = [str(v) for v in rng.choice(["<=", ">=", "="], size=m, p=[0.65, 0.25, 0.1])]
    rhs = rng.integers(-2, 6, size=m)
    c = rng.integers(-5, 6, size=n)
    return c, rows, rels, rhs
