"""State-feedback synthesis for positive T-S fuzzy models by linear programming.

Parallel distributed compensation ``u = sum_j h_j K_j x`` is searched through
the substitution ``xi[j, t] = K_j[:, t] * p[t]``, which turns closed-loop
stability and positivity of every vertex pair ``A_i + B_i K_j`` into linear
constraints on ``(p, xi)``.
"""

from __future__ import annotations

import copy
import enum
import json
import math
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import lp
from .analysis import IntervalVerdict, interval_check
from .linalg import as_vector, is_nonneg, perron_radius
from .model import FuzzyModel, IntervalMatrix, model_from_dict, model_to_dict


VERIFY_TOL = 1e-12


class SynthesisMode(str, enum.Enum):
    STANDARD = "standard"
    POSITIVE_INPUT = "positive-input"
    ROBUST = "robust"


class SynthesisError(ValueError):
    pass


@dataclass
class SynthesisResult:
    mode: str
    K: np.ndarray  # (r, m, n)
    p: np.ndarray | None = None  # (n,)
    xi: np.ndarray | None = None  # (r, n, m); xi[j, t] pairs with state index t
    margin: float | None = None

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "p": None if self.p is None else self.p.tolist(),
            "xi": None if self.xi is None else self.xi.tolist(),
            "K": self.K.tolist(),
            "margin": self.margin,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SynthesisResult":
        if not isinstance(data, dict) or "K" not in data:
            raise SynthesisError("gains file: missing required field K")
        try:
            K = np.array(data["K"], dtype=float)
        except (TypeError, ValueError):
            raise SynthesisError("gains file: K must be a list of matrices") from None
        if K.ndim != 3 or not np.all(np.isfinite(K)):
            raise SynthesisError("gains file: K must be a list of finite m x n matrices")
        p = data.get("p")
        xi = data.get("xi")
        margin = data.get("margin")
        return cls(
            str(data.get("mode", "unknown")),
            K,
            None if p is None else np.array(p, dtype=float),
            None if xi is None else np.array(xi, dtype=float),
            None if margin is None else float(margin),
        )


def save_gains(result: SynthesisResult, path) -> None:
    Path(path).write_text(json.dumps(result.to_dict(), indent=2) + "\n")


def load_gains(path) -> SynthesisResult:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except OSError as exc:
        raise SynthesisError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise SynthesisError(f"{path}: invalid JSON ({exc})") from None
    return SynthesisResult.from_dict(data)


def reconstruct_gains(p, xi) -> np.ndarray:
    """K_j[:, t] = xi[j, t] / p[t]; ``xi`` has shape (r, n, m), result (r, m, n)."""
    p = as_vector(p, "p")
    if np.any(p <= 0):
        raise SynthesisError("gain reconstruction needs a strictly positive p")
    xi = np.asarray(xi, dtype=float)
    if xi.ndim == 2:
        xi = xi[:, :, None]
    if xi.shape[1] != p.size:
        raise SynthesisError(f"xi has {xi.shape[1]} state slots, p has length {p.size}")
    return np.transpose(xi, (0, 2, 1)) / p


def _bounds(model: FuzzyModel, mode: SynthesisMode):
    if mode is SynthesisMode.ROBUST:
        if not model.is_interval:
            raise SynthesisError("robust mode needs a model with A_lower/A_upper bounds")
        return [r.A.upper for r in model.rules], [r.A.lower for r in model.rules]
    if model.is_interval:
        raise SynthesisError(f"{mode.value} mode needs exact A matrices; use robust mode for interval models")
    mats = [r.A.lower for r in model.rules]
    return mats, mats


def synthesis_program(model: FuzzyModel, mode: SynthesisMode | str = SynthesisMode.STANDARD) -> lp.LpProblem:
    """Max-margin program over (p, xi, eps).

    Rows, for all ordered pairs (i, j):
      stabilization  (A+_i - I) p + B_i sum_t xi[j, t] <= -eps
      positivity     A-_i[h, t] p[t] + B_i[h] @ xi[j, t] >= 0   (standard/robust)
    plus p >= eps. In positive-input mode the positivity rows are replaced by
    xi >= 0.
    """
    mode = SynthesisMode(mode)
    upper, lower = _bounds(model, mode)
    if mode is SynthesisMode.POSITIVE_INPUT:
        for i, rule in enumerate(model.rules):
            if not (is_nonneg(rule.A.lower) and is_nonneg(rule.B)):
                raise SynthesisError(f"positive-input mode needs A_i, B_i >= 0 (rule {i + 1} fails)")
    n, m, r = model.n, model.m, model.r
    nv = n + r * n * m + 1
    eps = nv - 1

    def xi_slice(j, t):
        start = n + (j * n + t) * m
        return slice(start, start + m)

    c = np.zeros(nv)
    c[eps] = 1.0
    lo = np.full(nv, -np.inf)
    hi = np.full(nv, np.inf)
    lo[:n], hi[:n] = 0.0, 1.0
    lo[eps], hi[eps] = 0.0, 1.0
    if mode is SynthesisMode.POSITIVE_INPUT:
        lo[n:eps] = 0.0
    prob = lp.LpProblem(nv, c, lower=lo, upper=hi)
    eye = np.eye(n)
    for i, rule in enumerate(model.rules):
        B = rule.B
        for j in range(r):
            for h in range(n):
                row = np.zeros(nv)
                row[:n] = upper[i][h] - eye[h]
                for t in range(n):
                    row[xi_slice(j, t)] += B[h]
                row[eps] = 1.0
                prob.add(row, "<=", 0.0)
            if mode is SynthesisMode.POSITIVE_INPUT:
                continue
            for h in range(n):
                for t in range(n):
                    row = np.zeros(nv)
                    row[t] = lower[i][h, t]
                    row[xi_slice(j, t)] = B[h]
                    prob.add(row, ">=", 0.0)
    for h in range(n):
        row = np.zeros(nv)
        row[h], row[eps] = 1.0, -1.0
        prob.add(row, ">=", 0.0)
    return prob


def unpack(model: FuzzyModel, values) -> tuple[np.ndarray, np.ndarray, float]:
    n, m, r = model.n, model.m, model.r
    values = np.asarray(values, dtype=float)
    return values[:n].copy(), values[n : n + r * n * m].reshape(r, n, m).copy(), float(values[-1])


def pack(p, xi, eps: float) -> np.ndarray:
    return np.concatenate([np.asarray(p, dtype=float), np.asarray(xi, dtype=float).reshape(-1), [eps]])


def synthesize(model: FuzzyModel, mode: SynthesisMode | str = SynthesisMode.STANDARD) -> SynthesisResult | None:
    """PDC gains with a verified feasibility margin, or None when infeasible."""
    mode = SynthesisMode(mode)
    sol = lp.solve(synthesis_program(model, mode))
    if sol.status is lp.Status.INFEASIBLE:
        return None
    if not sol.optimal:
        raise RuntimeError(f"LP solver failed: {sol.status.value}")
    p, xi, eps = unpack(model, sol.values)
    if eps <= lp.margin_threshold():
        return None
    return SynthesisResult(mode.value, reconstruct_gains(p, xi), p, xi, eps)


def _gain_array(model: FuzzyModel, gains) -> np.ndarray:
    if isinstance(gains, SynthesisResult):
        gains = gains.K
    K = np.asarray(gains, dtype=float)
    if K.ndim == 2:
        K = np.broadcast_to(K, (model.r,) + K.shape)
    if K.shape != (model.r, model.m, model.n):
        raise SynthesisError(f"gains have shape {K.shape}, expected {(model.r, model.m, model.n)}")
    return K


def closed_loop_vertices(model: FuzzyModel, gains) -> dict[tuple[int, int], IntervalMatrix]:
    """[A-_i + B_i K_j, A+_i + B_i K_j] for every ordered pair (i, j), 0-based."""
    K = _gain_array(model, gains)
    out = {}
    for i, rule in enumerate(model.rules):
        for j in range(model.r):
            out[(i, j)] = rule.A.shifted(rule.B @ K[j])
    return out


@dataclass
class VertexReport:
    i: int
    j: int
    verdict: IntervalVerdict
    radius: float | None  # Perron root of the upper bound (None when it has negative entries)
    output_nonneg: bool | None = None

    @property
    def passed(self) -> bool:
        return self.verdict is IntervalVerdict.POSITIVE_AND_SCHUR


@dataclass
class ClosedLoopReport:
    vertices: list[VertexReport] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.vertices)

    @property
    def radii(self) -> list[float | None]:
        return [v.radius for v in self.vertices]


def verify_closed_loop(model: FuzzyModel, gains, check_output: bool = False, tol: float = VERIFY_TOL) -> ClosedLoopReport:
    """Positivity of every A-_i + B_i K_j and Schur stability of every A+_i + B_i K_j.

    ``tol`` absorbs the roundoff of K = xi / p on entries that are exactly
    zero in exact arithmetic.
    """
    K = _gain_array(model, gains)
    report = ClosedLoopReport()
    for (i, j), iv in closed_loop_vertices(model, K).items():
        radius = perron_radius(np.clip(iv.upper, 0.0, None)) if is_nonneg(iv.upper, tol) else None
        out = None
        if check_output:
            rule = model.rules[i]
            out = is_nonneg(rule.C + rule.D @ K[j], tol)
        report.vertices.append(VertexReport(i, j, interval_check(iv, tol), radius, out))
    return report


# ------------------------------------------------------------ region sweep

_PATH = re.compile(r"rules\[(\d+)\]\.(A|A_lower|A_upper|B|C|D)\[(\d+)\]\[(\d+)\]\Z")


@dataclass(frozen=True)
class ParamSpec:
    path: str
    start: float
    stop: float
    step: float

    @classmethod
    def parse(cls, text: str) -> "ParamSpec":
        try:
            path, rng = text.split("=", 1)
            start, stop, step = (float(v) for v in rng.split(":"))
        except ValueError:
            raise SynthesisError(f"bad parameter spec {text!r}; expected path=start:stop:step") from None
        return cls(path.strip(), start, stop, step)

    def values(self) -> np.ndarray:
        if not self.step > 0 or self.stop < self.start:
            raise SynthesisError(f"bad grid {self.start}:{self.stop}:{self.step}")
        count = int(math.floor((self.stop - self.start) / self.step + 1e-9)) + 1
        # index multiplication, rounded to shed representation noise
        return np.round(self.start + np.arange(count) * self.step, 12)


def _set_entry(data: dict, path: str, value: float) -> None:
    m = _PATH.match(path)
    if m is None:
        raise SynthesisError(f"bad parameter path {path!r}; expected e.g. rules[0].A[1][0]")
    i, fam, r, c = int(m[1]), m[2], int(m[3]), int(m[4])
    rules = data.get("rules", [])
    if i >= len(rules):
        raise SynthesisError(f"bad parameter path {path!r}: no rule {i}")
    rule = rules[i]
    if fam not in rule:
        raise SynthesisError(f"bad parameter path {path!r}: rule {i} has no field {fam}")
    mat = rule[fam]
    if r >= len(mat) or c >= len(mat[r]):
        raise SynthesisError(f"bad parameter path {path!r}: entry out of range")
    mat[r][c] = float(value)


def instantiate(template: dict, assignments) -> FuzzyModel:
    data = copy.deepcopy(template)
    for path, value in assignments:
        _set_entry(data, path, value)
    return model_from_dict(data)


def _point_feasible(args) -> bool:
    template, assignments, mode = args
    return synthesize(instantiate(template, assignments), mode) is not None


@dataclass
class Region:
    specs: list[ParamSpec]
    axes: list[np.ndarray]
    feasible: np.ndarray  # bool, shape = tuple(len(a) for a in axes)

    def rows(self):
        """(param values..., feasible) in row-major grid order."""
        for idx in np.ndindex(*self.feasible.shape):
            yield tuple(float(self.axes[k][idx[k]]) for k in range(len(idx))) + (bool(self.feasible[idx]),)


def feasibility_region(model_template, param_specs, mode=None, workers: int = 1) -> Region:
    if isinstance(model_template, FuzzyModel):
        template = model_to_dict(model_template)
    else:
        template = copy.deepcopy(model_template)
    specs = [s if isinstance(s, ParamSpec) else ParamSpec.parse(s) for s in param_specs]
    if not specs:
        raise SynthesisError("at least one parameter is required")
    axes = [s.values() for s in specs]
    # validate paths up front so a bad path is an error, not an infeasible grid
    probe = copy.deepcopy(template)
    for s in specs:
        _set_entry(probe, s.path, s.start)
    if mode is None:
        mode = SynthesisMode.ROBUST if model_from_dict(template).is_interval else SynthesisMode.STANDARD
    mode = SynthesisMode(mode)
    shape = tuple(len(a) for a in axes)
    jobs = [
        (template, [(s.path, axes[k][idx[k]]) for k, s in enumerate(specs)], mode)
        for idx in np.ndindex(*shape)
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            flags = list(pool.map(_point_feasible, jobs, chunksize=16))
    else:
        flags = [_point_feasible(job) for job in jobs]
    return Region(specs, axes, np.array(flags, dtype=bool).reshape(shape))
