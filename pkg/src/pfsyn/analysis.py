"""Open-loop analysis via linear copositive Lyapunov functions V(x) = p @ x."""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass

import numpy as np

from . import lp
from .linalg import as_matrix, is_nonneg
from .model import FuzzyModel, IntervalMatrix, check_model_positivity


class Variant(str, enum.Enum):
    LP1 = "LP1"  # p @ (A_i - I) << 0
    LP2 = "LP2"  # (A_i - I) @ p << 0


@dataclass(frozen=True)
class StabilityCertificate:
    variant: Variant
    p: np.ndarray
    margin: float


def margin_program(matrices) -> lp.LpProblem:
    """max eps s.t. (M_i - I) p <= -eps, p >= eps, p <= 1, 0 <= eps <= 1.

    The conditions are a cone in p, so capping p at 1 loses nothing.
    Variable layout: p_0..p_{n-1}, eps.
    """
    n = matrices[0].shape[0]
    c = np.zeros(n + 1)
    c[n] = 1.0
    prob = lp.LpProblem(n + 1, c, lower=np.zeros(n + 1), upper=np.ones(n + 1))
    eye = np.eye(n)
    for M in matrices:
        for h in range(n):
            row = np.append(M[h] - eye[h], 1.0)
            prob.add(row, "<=", 0.0)
    for h in range(n):
        row = np.zeros(n + 1)
        row[h], row[n] = 1.0, -1.0
        prob.add(row, ">=", 0.0)
    return prob


def certify_matrices(matrices, variant: Variant | str = Variant.LP2) -> StabilityCertificate | None:
    """Common certificate for a list of square matrices, or None.

    With LP1, p @ x decreases along x+ = M x for every M in the list and x >= 0.
    """
    variant = Variant(variant)
    matrices = [as_matrix(M) for M in matrices]
    if variant is Variant.LP1:
        matrices = [M.T for M in matrices]
    sol = lp.solve(margin_program(matrices))
    if sol.status is lp.Status.INFEASIBLE:
        return None
    if not sol.optimal:
        raise RuntimeError(f"LP solver failed: {sol.status.value}")
    n = matrices[0].shape[0]
    eps = float(sol.values[n])
    if eps <= lp.margin_threshold():
        return None
    return StabilityCertificate(variant, sol.values[:n].copy(), eps)


def certify_stability(model: FuzzyModel, variant: Variant | str = Variant.LP2) -> StabilityCertificate | None:
    """Common linear Lyapunov vector for all rules with u = 0, or None.

    Interval models are certified on their upper bounds. LP1 is LP2 applied
    to the transposed rule matrices.
    """
    variant = Variant(variant)
    if not check_model_positivity(model).positive:
        warnings.warn("model is not positive; the linear Lyapunov certificate may not be meaningful", stacklevel=2)
    return certify_matrices([rule.A.upper for rule in model.rules], variant)


def schur_certificate(a) -> bool:
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"schur_certificate needs a square matrix, got {a.shape}")
    if not is_nonneg(a, 0.0):
        raise ValueError("schur_certificate needs a nonnegative matrix")
    return certify_matrices([a], Variant.LP2) is not None


class IntervalVerdict(str, enum.Enum):
    POSITIVE_AND_SCHUR = "PositiveAndSchur"
    NOT_POSITIVE = "NotPositive"
    NOT_SCHUR = "NotSchur"
    BOTH = "Both"


def interval_check(m: IntervalMatrix, tol: float = 0.0) -> IntervalVerdict:
    """Every matrix in [lower, upper] is positive and Schur iff lower >= 0 and upper is Schur.

    Entries within ``tol`` below zero count as zero.
    """
    if m.shape[0] != m.shape[1]:
        raise ValueError("interval_check needs square bounds")
    positive = is_nonneg(m.lower, tol)
    if not is_nonneg(m.upper, tol):
        return IntervalVerdict.NOT_POSITIVE
    schur = schur_certificate(np.clip(m.upper, 0.0, None))
    if positive:
        return IntervalVerdict.POSITIVE_AND_SCHUR if schur else IntervalVerdict.NOT_SCHUR
    return IntervalVerdict.NOT_POSITIVE if schur else IntervalVerdict.BOTH


def dual_equivalence_check(model: FuzzyModel) -> bool:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        primal = certify_stability(model, Variant.LP1)
        dual = certify_stability(model.transposed(), Variant.LP2)
    return (primal is None) == (dual is None)
