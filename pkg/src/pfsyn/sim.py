"""Open- and closed-loop simulation of the fuzzy plant under PDC feedback."""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .linalg import as_vector
from .model import FuzzyModel, check_model_positivity, evaluate_memberships

REALIZATIONS = ("upper", "lower", "nominal")


class SimulationError(RuntimeError):
    def __init__(self, message: str, step: int):
        super().__init__(f"{message} at step {step}")
        self.step = step


@dataclass
class Trajectory:
    """Arrays indexed by step k = 0..steps; u, y and h at k are computed from x(k)."""

    x: np.ndarray  # (N, n)
    u: np.ndarray  # (N, m)
    y: np.ndarray  # (N, l)
    h: np.ndarray  # (N, r)

    def __post_init__(self):
        if len(self.x) == 0:
            raise ValueError("trajectory must contain at least one record")
        if not len(self.x) == len(self.u) == len(self.y) == len(self.h):
            raise ValueError("trajectory arrays must have equal length")

    def __len__(self) -> int:
        return len(self.x)

    @property
    def k(self) -> np.ndarray:
        return np.arange(len(self.x))

    def norms(self) -> np.ndarray:
        return np.linalg.norm(self.x, axis=1)


def _realize(model: FuzzyModel, realization: str) -> list[np.ndarray]:
    if realization == "upper":
        return [r.A.upper for r in model.rules]
    if realization == "lower":
        return [r.A.lower for r in model.rules]
    if realization == "nominal":
        return [r.A.midpoint for r in model.rules]
    raise ValueError(f"realization must be one of {REALIZATIONS}, got {realization!r}")


def simulate(model: FuzzyModel, gains=None, x0=None, steps: int = 1, realization: str = "upper",
             allow_negative_x0: bool = False) -> Trajectory:
    """Iterate x(k+1) = sum_i h_i (A_i x + B_i u) with u = sum_j h_j K_j x.

    The plant blend and the controller share the membership vector of x(k).
    """
    if steps < 1:
        raise ValueError("steps must be a positive integer")
    x = as_vector(x0, "x0").copy()
    if x.size != model.n:
        raise ValueError(f"x0 has dimension {x.size}, model has n = {model.n}")
    if np.any(x < 0):
        if check_model_positivity(model).positive and not allow_negative_x0:
            raise ValueError("x0 has negative entries; a positive system needs x0 >= 0")
        warnings.warn("simulating from a negative initial state", stacklevel=2)
    A = np.stack(_realize(model, realization))
    B = np.stack([r.B for r in model.rules])
    C = np.stack([r.C for r in model.rules])
    D = np.stack([r.D for r in model.rules])
    K = None
    if gains is not None:
        K = np.asarray(getattr(gains, "K", gains), dtype=float)
        if K.ndim == 2:
            K = np.broadcast_to(K, (model.r,) + K.shape)
        if K.shape != (model.r, model.m, model.n):
            raise ValueError(f"gains have shape {K.shape}, expected {(model.r, model.m, model.n)}")

    N = steps + 1
    xs = np.empty((N, model.n))
    us = np.zeros((N, model.m))
    ys = np.empty((N, model.l))
    hs = np.empty((N, model.r))
    for k in range(N):
        if not np.all(np.isfinite(x)):
            raise SimulationError("state became non-finite", k)
        h = evaluate_memberships(model, x)
        u = np.einsum("j,jmn,n->m", h, K, x) if K is not None else np.zeros(model.m)
        xs[k], us[k], hs[k] = x, u, h
        ys[k] = np.einsum("i,iln,n->l", h, C, x) + np.einsum("i,ilm,m->l", h, D, u)
        if k + 1 < N:
            with np.errstate(over="ignore", invalid="ignore"):
                x = np.einsum("i,ipn,n->p", h, A, x) + np.einsum("i,ipm,m->p", h, B, u)
    return Trajectory(xs, us, ys, hs)


def csv_header(model_or_dims) -> list[str]:
    n, m, l, r = model_or_dims
    return (["k"] + [f"x{i + 1}" for i in range(n)] + [f"u{i + 1}" for i in range(m)]
            + [f"y{i + 1}" for i in range(l)] + [f"h{i + 1}" for i in range(r)])


def export_csv(traj: Trajectory, path) -> None:
    header = csv_header((traj.x.shape[1], traj.u.shape[1], traj.y.shape[1], traj.h.shape[1]))
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for k in range(len(traj)):
            vals = np.concatenate([traj.x[k], traj.u[k], traj.y[k], traj.h[k]])
            w.writerow([k] + [format(v, ".9g") for v in vals])
