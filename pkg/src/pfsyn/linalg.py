"""Small dense matrix helpers and the Perron root of nonnegative matrices.

Matrices are plain 2-D float ``numpy`` arrays. Every function validates its
inputs and returns fresh read-only arrays, so callers can treat results as
values.
"""

from __future__ import annotations

import numpy as np
from scipy.sparse.csgraph import connected_components

PERRON_TOL = 1e-9
PERRON_MAX_ITER = 100_000


class ConvergenceError(RuntimeError):
    pass


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    m = np.array(a, dtype=float)
    if m.ndim == 1:
        m = m.reshape(1, -1)
    if m.ndim != 2 or m.size == 0:
        raise ValueError(f"{name}: expected a non-empty 2-D array, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name}: entries must be finite")
    m.setflags(write=False)
    return m


def as_vector(v, name: str = "vector") -> np.ndarray:
    x = np.array(v, dtype=float).reshape(-1)
    if x.size == 0:
        raise ValueError(f"{name}: empty vector")
    if not np.all(np.isfinite(x)):
        raise ValueError(f"{name}: entries must be finite")
    x.setflags(write=False)
    return x


def _frozen(m: np.ndarray) -> np.ndarray:
    m.setflags(write=False)
    return m


def mat_add(a, b) -> np.ndarray:
    a, b = as_matrix(a, "a"), as_matrix(b, "b")
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} + {b.shape}")
    return _frozen(a + b)


def mat_mul(a, b) -> np.ndarray:
    a, b = as_matrix(a, "a"), as_matrix(b, "b")
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"shape mismatch: {a.shape} @ {b.shape}")
    return _frozen(a @ b)


def is_nonneg(a, tol: float = 0.0) -> bool:
    if tol < 0:
        raise ValueError("tol must be >= 0")
    return bool(np.all(as_matrix(a) >= -tol))


def _block_bracket(a: np.ndarray, tol: float, max_iter: int) -> tuple[float, float]:
    """Collatz-Wielandt bracket on the Perron root of an irreducible block.

    Power iteration on ``M = a/s + I`` (``s`` the largest row sum). ``M`` is
    primitive, so the ratios ``min_i (Mv)_i / v_i <= rho(M) <= max_i (Mv)_i / v_i``
    pinch together. Iterates are advanced with ``M^(2^k)`` (repeated squaring)
    so nearly decomposable blocks, whose subdominant eigenvalue sits close to
    the Perron root, still converge in a few dozen steps.
    """
    n = a.shape[0]
    if n == 1:
        return float(a[0, 0]), float(a[0, 0])
    scale = float(a.sum(axis=1).max())
    if scale == 0.0:
        return 0.0, 0.0
    M = a / scale + np.eye(n)
    W = M.copy()
    v = np.ones(n)
    for _ in range(max_iter):
        w = M @ v
        ratios = w / v
        lo, hi = ratios.min(), ratios.max()
        if (hi - lo) * scale <= tol:
            return float(lo - 1.0) * scale, float(hi - 1.0) * scale
        jump = W @ v
        if np.all(jump > 0) and np.all(np.isfinite(jump)):
            v = jump / jump.max()
            W = W @ W
            W /= W.max()
        else:
            # squaring underflowed a component; fall back to plain steps
            v = w / w.max()
        if not np.all(v > 0):
            # entries spanning hundreds of decades: the Perron vector underflows
            raise ConvergenceError("Perron vector underflowed; matrix entries span too many orders of magnitude")
    raise ConvergenceError(f"power iteration did not converge in {max_iter} iterations")


def perron_bracket(a, tol: float = PERRON_TOL, max_iter: int = PERRON_MAX_ITER) -> tuple[float, float]:
    """Lower and upper bounds on the spectral radius of a nonnegative matrix.

    The matrix is split into strongly connected components (its Frobenius
    normal form). Its radius is the largest Perron root among the irreducible
    diagonal blocks, each bracketed by shifted power iteration.
    """
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"perron_radius needs a square matrix, got {a.shape}")
    if not is_nonneg(a, 0.0):
        raise ValueError("perron_radius needs an entrywise nonnegative matrix")
    ncomp, labels = connected_components(a > 0, directed=True, connection="strong")
    lo = hi = 0.0
    for c in range(ncomp):
        idx = np.flatnonzero(labels == c)
        blo, bhi = _block_bracket(a[np.ix_(idx, idx)], tol, max_iter)
        lo, hi = max(lo, blo), max(hi, bhi)
    return lo, hi


def perron_radius(a, tol: float = PERRON_TOL, max_iter: int = PERRON_MAX_ITER) -> float:
    lo, hi = perron_bracket(a, tol, max_iter)
    return 0.5 * (lo + hi)
