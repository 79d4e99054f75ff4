import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import linprog

from oracles import random_integer_lp, vertex_enumeration_lp
from pfsyn import lp
from pfsyn.lp import LpProblem, Status, check_point, solve


def build(c, rows, rels, rhs, **kw):
    prob = LpProblem(len(c), c, **kw)
    for row, rel, b in zip(rows, rels, rhs):
        prob.add(row, rel, b)
    return prob


def test_trivial_optimal():
    prob = build([1.0], [[1.0]], ["<="], [1.0])
    sol = solve(prob)
    assert sol.status is Status.OPTIMAL
    assert sol.values[0] == pytest.approx(1.0)
    assert check_point(prob, sol.values).satisfied


def test_trivial_infeasible():
    sol = solve(build([0.0], [[1.0]], ["<="], [-1.0]))
    assert sol.status is Status.INFEASIBLE
    assert sol.values is None


def test_unbounded():
    assert solve(build([1.0, 0.0], [[1.0, -1.0]], ["<="], [1.0])).status is Status.UNBOUNDED


def test_no_constraints():
    assert solve(LpProblem(2, [0.0, -1.0])).objective_value == 0.0
    assert solve(LpProblem(1, [1.0], upper=[3.0])).objective_value == pytest.approx(3.0)
    assert solve(LpProblem(1, [1.0])).status is Status.UNBOUNDED


def test_check_point():
    prob = build([0.0], [[1.0]], [">="], [1.0])
    rep = check_point(prob, [0.0])
    assert not rep.satisfied
    assert rep.residuals[0] == 1.0 and rep.worst == 1.0
    assert check_point(prob, [1.0]).satisfied
    eq = build([0.0, 0.0], [[1.0, 1.0]], ["="], [2.0], upper=[1.0, np.inf])
    rep = check_point(eq, [1.5, 0.5])
    assert rep.residuals[0] == 0 and rep.bound_residuals[0] == pytest.approx(0.5)
    with pytest.raises(ValueError):
        check_point(eq, [1.0])


def test_problem_validation():
    with pytest.raises(ValueError):
        LpProblem(2, [1.0])
    prob = LpProblem(2, [1.0, 1.0])
    with pytest.raises(ValueError, match="relation"):
        prob.add([1, 1], "<", 1)
    with pytest.raises(ValueError, match="length"):
        prob.add([1], "<=", 1)
    with pytest.raises(ValueError, match="finite"):
        prob.add([1, math.nan], "<=", 1)


def test_degenerate_cycling_example():
    """Beale's example cycles under the textbook rule; Bland's rule terminates."""
    c = [0.75, -150, 0.02, -6]
    rows = [[0.25, -60, -0.04, 9], [0.5, -90, -0.02, 3], [0, 0, 1, 0]]
    sol = solve(build(c, rows, ["<="] * 3, [0, 0, 1]))
    assert sol.optimal
    assert sol.objective_value == pytest.approx(0.05)


def test_iteration_limit():
    c = [0.75, -150, 0.02, -6]
    rows = [[0.25, -60, -0.04, 9], [0.5, -90, -0.02, 3], [0, 0, 1, 0]]
    assert solve(build(c, rows, ["<="] * 3, [0, 0, 1]), max_iter=1).status is Status.ITERATION_LIMIT


def test_margin_threshold_env(monkeypatch):
    assert lp.margin_threshold() == lp.DEFAULT_MARGIN_THRESHOLD
    monkeypatch.setenv("PFSYN_LP_TOL", "1e-6")
    assert lp.margin_threshold() == 1e-6
    monkeypatch.setenv("PFSYN_LP_TOL", "abc")
    with pytest.raises(ValueError):
        lp.margin_threshold()


def test_deterministic():
    rng = np.random.default_rng(3)
    c, rows, rels, rhs = random_integer_lp(rng)
    a, b = solve(build(c, rows, rels, rhs)), solve(build(c, rows, rels, rhs))
    assert a.status == b.status and a.iterations == b.iterations
    if a.optimal:
        np.testing.assert_array_equal(a.values, b.values)


def test_upper_bounds_against_vertex_oracle():
    """Variable caps handled internally must agree with caps written as rows."""
    rng = np.random.default_rng(11)
    for _ in range(150):
        c, rows, rels, rhs = random_integer_lp(rng)
        n = len(c)
        caps = rng.integers(1, 4, size=n)
        capped = [k for k in range(n) if rng.random() < 0.5]
        upper = np.full(n, np.inf)
        upper[capped] = caps[capped]
        o_rows = list(rows) + [np.eye(n, dtype=int)[k] for k in capped]
        o_rels = list(rels) + ["<="] * len(capped)
        o_rhs = list(rhs) + [int(caps[k]) for k in capped]
        status, value = vertex_enumeration_lp(c, o_rows, o_rels, o_rhs)
        sol = solve(build(c, rows, rels, rhs, upper=upper))
        assert sol.status.value == status
        if status == "optimal":
            assert abs(sol.objective_value - float(value)) <= 1e-9
            assert check_point(build(c, rows, rels, rhs, upper=upper), sol.values, 1e-9).satisfied


def test_free_and_shifted_variables_against_highs():
    rng = np.random.default_rng(5)
    for _ in range(100):
        c, rows, rels, rhs = random_integer_lp(rng)
        n = len(c)
        lower = rng.choice([0.0, -2.0, -np.inf], size=n)
        upper = rng.choice([np.inf, 3.0], size=n)
        sol = solve(build(c, rows, rels, rhs, lower=lower, upper=upper))
        A = np.asarray(rows, dtype=float)
        ub = [(r, b) for r, rel, b in zip(A, rels, rhs) if rel == "<="] + [(-r, -b) for r, rel, b in zip(A, rels, rhs) if rel == ">="]
        eq = [(r, b) for r, rel, b in zip(A, rels, rhs) if rel == "="]
        ref = linprog(
            -np.asarray(c, dtype=float),
            A_ub=np.array([r for r, _ in ub]) if ub else None,
            b_ub=np.array([b for _, b in ub]) if ub else None,
            A_eq=np.array([r for r, _ in eq]) if eq else None,
            b_eq=np.array([b for _, b in eq]) if eq else None,
            bounds=[(None if math.isinf(lo) else lo, None if math.isinf(hi) else hi) for lo, hi in zip(lower, upper)],
            method="highs",
        )
        expected = {0: "optimal", 2: "infeasible", 3: "unbounded"}[ref.status]
        if ref.status == 3 and sol.status is Status.INFEASIBLE:
            continue  # HiGHS may report "unbounded or infeasible" as unbounded during presolve
        assert sol.status.value == expected
        if expected == "optimal":
            assert sol.objective_value == pytest.approx(-ref.fun, abs=1e-7)


@given(st.lists(st.floats(0.1, 10), min_size=1, max_size=5))
def test_box_lp(weights):
    """max sum(w x) over the unit box is sum(w), attained at x = 1."""
    n = len(weights)
    sol = solve(LpProblem(n, weights, upper=np.ones(n)))
    assert sol.optimal
    assert sol.objective_value == pytest.approx(sum(weights))
    np.testing.assert_allclose(sol.values, 1.0)
