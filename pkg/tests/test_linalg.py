import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from oracles import two_by_two_radius
from pfsyn.linalg import ConvergenceError, is_nonneg, mat_add, mat_mul, perron_bracket, perron_radius

A1 = np.array([[0.6, 0.6], [0.6, 0.4]])
A1_CL = np.array([[0.5274, 0.4802], [0.4548, 0.1604]])


def test_mat_add():
    assert np.array_equal(mat_add(np.eye(2), np.zeros((2, 2))), np.eye(2))
    assert np.array_equal(mat_add(A1, -A1), np.zeros((2, 2)))
    bk = [[-0.0726, -0.1198], [-0.1452, -0.2396]]
    np.testing.assert_allclose(mat_add(A1, bk), A1_CL, atol=1e-12)
    with pytest.raises(ValueError, match="shape"):
        mat_add(np.eye(2), np.eye(3))


def test_mat_mul():
    np.testing.assert_array_equal(mat_mul(np.eye(2), A1), A1)
    np.testing.assert_allclose(
        mat_mul([[0.1], [0.2]], [[-0.7261, -1.1979]]),
        [[-0.07261, -0.11979], [-0.14522, -0.23958]],
        atol=1e-12,
    )
    nil = [[0, 1], [0, 0]]
    assert not mat_mul(nil, nil).any()
    with pytest.raises(ValueError, match="shape"):
        mat_mul(np.eye(2), np.ones((3, 1)))


def test_results_are_read_only():
    out = mat_add(A1, A1)
    with pytest.raises(ValueError):
        out[0, 0] = 1.0


def test_rejects_nan():
    with pytest.raises(ValueError, match="finite"):
        mat_add([[np.nan]], [[1.0]])


def test_is_nonneg():
    assert is_nonneg(A1)
    lower = [[-0.02, 0.15, 0.04], [0.04, 0, 0], [0, 0.04, 0]]
    assert not is_nonneg(lower, 0.0)
    assert is_nonneg(lower, 0.05)
    assert is_nonneg(np.zeros((3, 3)))
    with pytest.raises(ValueError):
        is_nonneg(A1, -1.0)


def test_perron_known_values():
    assert perron_radius(np.eye(2)) == pytest.approx(1.0, abs=1e-9)
    assert perron_radius(A1_CL) == pytest.approx(0.8460, abs=1e-3)
    assert perron_radius(A1) == pytest.approx(1.1082763, abs=1e-7)
    assert perron_radius(np.zeros((3, 3))) == 0.0


def test_perron_reducible():
    # block triangular with equal diagonal: plain power iteration converges only like 1/k
    a = np.array([[0.5, 1.0, 0.0], [0.0, 0.5, 0.0], [0.0, 0.3, 0.7]])
    assert perron_radius(a) == pytest.approx(0.7, abs=1e-9)
    assert perron_radius(np.diag([0.2, 0.9, 0.4])) == pytest.approx(0.9, abs=1e-12)


def test_perron_rejects_bad_input():
    with pytest.raises(ValueError, match="square"):
        perron_radius(np.ones((2, 3)))
    with pytest.raises(ValueError, match="nonnegative"):
        perron_radius([[0.5, -0.1], [0.0, 0.2]])


def test_perron_iteration_cap():
    a = np.array([[0.5, 1.0], [1.0, 0.2]])
    with pytest.raises(ConvergenceError):
        perron_radius(a, max_iter=1)


def entries(hi):
    return st.one_of(st.just(0.0), st.floats(1e-6, hi))


nonneg_2x2 = arrays(np.float64, (2, 2), elements=entries(10))


@given(nonneg_2x2)
def test_perron_matches_characteristic_polynomial(a):
    assert perron_radius(a) == pytest.approx(two_by_two_radius(a), abs=1e-6)


@given(arrays(np.float64, (4, 4), elements=entries(5)), st.floats(0.01, 10))
def test_perron_homogeneous(a, c):
    assert perron_radius(c * a) == pytest.approx(c * perron_radius(a), abs=1e-8)


@given(arrays(np.float64, (5, 5), elements=entries(3)))
def test_bracket_width(a):
    lo, hi = perron_bracket(a)
    assert 0 <= hi - lo <= 1e-8
    assert lo - 1e-9 <= np.abs(np.linalg.eigvals(a)).max() <= hi + 1e-9
