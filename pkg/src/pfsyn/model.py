"""Takagi-Sugeno fuzzy plant model with optional interval uncertainty on A."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import expr
from .linalg import as_matrix, as_vector

MEMBERSHIP_NEG_TOL = 1e-9
MEMBERSHIP_SUM_MIN = 1e-12
VALIDATION_POINTS = 101
FAMILIES = ("A_lower", "A_upper", "B", "C", "D")


class ModelError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class IntervalMatrix:
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo, up = as_matrix(self.lower, "lower"), as_matrix(self.upper, "upper")
        if lo.shape != up.shape:
            raise ModelError(f"interval bounds differ in shape: {lo.shape} vs {up.shape}")
        bad = np.argwhere(lo > up)
        if bad.size:
            r, c = bad[0]
            raise ModelError(f"interval lower bound exceeds upper bound at entry ({r}, {c})")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", up)

    def __eq__(self, other):
        if not isinstance(other, IntervalMatrix):
            return NotImplemented
        return bool(np.array_equal(self.lower, other.lower) and np.array_equal(self.upper, other.upper))

    __hash__ = None

    @classmethod
    def exact(cls, a) -> "IntervalMatrix":
        a = as_matrix(a)
        return cls(a, a)

    @property
    def is_exact(self) -> bool:
        return bool(np.array_equal(self.lower, self.upper))

    @property
    def shape(self):
        return self.lower.shape

    @property
    def midpoint(self) -> np.ndarray:
        return 0.5 * (self.lower + self.upper)

    @property
    def T(self) -> "IntervalMatrix":
        return IntervalMatrix(self.lower.T, self.upper.T)

    def shifted(self, delta) -> "IntervalMatrix":
        return IntervalMatrix(self.lower + delta, self.upper + delta)


@dataclass(frozen=True)
class Rule:
    A: IntervalMatrix
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray
    membership: str

    def matrix(self, which: str) -> np.ndarray:
        if which == "A_lower":
            return self.A.lower
        if which == "A_upper":
            return self.A.upper
        if which in ("B", "C", "D"):
            return getattr(self, which)
        raise ValueError(f"unknown matrix family {which!r}")


@dataclass(frozen=True)
class FuzzyModel:
    n: int
    m: int
    l: int
    premise: str
    rules: tuple[Rule, ...]
    z_range: tuple[float, float] = (-1.0, 1.0)
    _premise_expr: expr.Expr = field(init=False, repr=False, compare=False)
    _membership_exprs: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "rules", tuple(self.rules))
        if not self.rules:
            raise ModelError("rules: at least one rule is required")
        for name in ("n", "m", "l"):
            v = getattr(self, name)
            if not isinstance(v, int) or isinstance(v, bool) or v < 1:
                raise ModelError(f"{name}: must be a positive integer")
        shapes = {"A": (self.n, self.n), "B": (self.n, self.m), "C": (self.l, self.n), "D": (self.l, self.m)}
        for i, rule in enumerate(self.rules):
            for name, want in shapes.items():
                got = rule.A.shape if name == "A" else rule.matrix(name).shape
                if got != want:
                    raise ModelError(f"dimension mismatch: rules[{i}].{name} has shape {got}, expected {want}")
        try:
            premise = expr.parse(self.premise)
        except expr.ExprError as exc:
            raise ModelError(f"premise: {exc}") from None
        if "z" in expr.variables(premise):
            raise ModelError("premise: may not reference z")
        if expr.max_state_index(premise) > self.n:
            raise ModelError(f"premise: references x{expr.max_state_index(premise)} but n = {self.n}")
        parsed = []
        for i, rule in enumerate(self.rules):
            try:
                e = expr.parse(rule.membership)
            except expr.ExprError as exc:
                raise ModelError(f"rules[{i}].membership: {exc}") from None
            if expr.variables(e) - {"z"}:
                raise ModelError(f"rules[{i}].membership: may only reference z")
            parsed.append(e)
        object.__setattr__(self, "_premise_expr", premise)
        object.__setattr__(self, "_membership_exprs", tuple(parsed))
        lo, hi = self.z_range
        if not lo <= hi:
            raise ModelError("z_range: lower end exceeds upper end")
        for z in np.linspace(lo, hi, VALIDATION_POINTS):
            try:
                self.memberships_at(float(z))
            except (ModelError, expr.ExprError) as exc:
                raise ModelError(f"membership validation failed at z = {z:.6g}: {exc}") from None

    @property
    def r(self) -> int:
        return len(self.rules)

    @property
    def is_interval(self) -> bool:
        return any(not rule.A.is_exact for rule in self.rules)

    def premise_value(self, x) -> float:
        x = as_vector(x, "x")
        if x.size != self.n:
            raise ModelError(f"state has dimension {x.size}, model has n = {self.n}")
        return expr.evaluate(self._premise_expr, x)

    def memberships_at(self, z: float) -> np.ndarray:
        raw = np.array([expr.evaluate(e, (), z) for e in self._membership_exprs])
        if np.any(raw < -MEMBERSHIP_NEG_TOL):
            i = int(np.argmin(raw))
            raise ModelError(f"membership {i} is negative ({raw[i]:.3g})")
        raw = np.clip(raw, 0.0, None)
        total = raw.sum()
        if total <= MEMBERSHIP_SUM_MIN:
            raise ModelError("memberships sum to zero")
        return raw / total

    def transposed(self) -> "FuzzyModel":
        """Model of the dual system (every A_i replaced by its transpose)."""
        rules = [Rule(rule.A.T, rule.B, rule.C, rule.D, rule.membership) for rule in self.rules]
        return FuzzyModel(self.n, self.m, self.l, self.premise, tuple(rules), self.z_range)


def evaluate_memberships(model: FuzzyModel, x) -> np.ndarray:
    return model.memberships_at(model.premise_value(x))


def blended_matrices(model: FuzzyModel, h, which: str) -> np.ndarray:
    h = as_vector(h, "h")
    if h.size != model.r:
        raise ModelError(f"membership vector has length {h.size}, model has {model.r} rules")
    mats = np.stack([rule.matrix(which) for rule in model.rules])
    return np.tensordot(h, mats, axes=1)


@dataclass
class PositivityReport:
    # (rule index, family, row, col, value), 0-based indices
    violations: list[tuple[int, str, int, int, float]]
    checked: dict[tuple[int, str], bool]

    @property
    def positive(self) -> bool:
        return not self.violations

    def describe(self) -> list[str]:
        return [
            f"rule {i + 1}: {fam}[{r + 1},{c + 1}] = {v:.6g} < 0"
            for i, fam, r, c, v in self.violations
        ]


def check_model_positivity(model: FuzzyModel, tol: float = 0.0) -> PositivityReport:
    """Entrywise nonnegativity of A (lower bound for intervals), B, C, D per rule."""
    violations = []
    checked = {}
    for i, rule in enumerate(model.rules):
        fam_a = "A" if rule.A.is_exact else "A_lower"
        for fam, mat in ((fam_a, rule.A.lower), ("B", rule.B), ("C", rule.C), ("D", rule.D)):
            bad = np.argwhere(mat < -tol)
            checked[(i, fam)] = not bad.size
            violations.extend((i, fam, int(r), int(c), float(mat[r, c])) for r, c in bad)
    return PositivityReport(violations, checked)


# ---------------------------------------------------------------- JSON I/O


def _field(d: dict, key: str, where: str):
    if key not in d:
        raise ModelError(f"{where}{key}: missing required field")
    return d[key]


def _matrix_field(d: dict, key: str, where: str) -> np.ndarray:
    value = _field(d, key, where)
    try:
        arr = np.array(value, dtype=float)
    except (TypeError, ValueError):
        raise ModelError(f"{where}{key}: must be a list of numeric rows") from None
    if arr.ndim != 2 or arr.size == 0:
        raise ModelError(f"{where}{key}: must be a non-empty list of equal-length rows")
    if not np.all(np.isfinite(arr)):
        raise ModelError(f"{where}{key}: entries must be finite")
    return as_matrix(arr)


def model_from_dict(data: dict) -> FuzzyModel:
    if not isinstance(data, dict):
        raise ModelError("model: top level must be a JSON object")
    dims = {}
    for key in ("n", "m", "l"):
        v = _field(data, key, "")
        if not isinstance(v, int) or isinstance(v, bool) or v < 1:
            raise ModelError(f"{key}: must be a positive integer")
        dims[key] = v
    premise = _field(data, "premise", "")
    if not isinstance(premise, str):
        raise ModelError("premise: must be a string")
    z_range = data.get("z_range", [-1.0, 1.0])
    if not (isinstance(z_range, list) and len(z_range) == 2 and all(isinstance(v, (int, float)) for v in z_range)):
        raise ModelError("z_range: must be a two-element numeric list")
    raw_rules = _field(data, "rules", "")
    if not isinstance(raw_rules, list) or not raw_rules:
        raise ModelError("rules: must be a non-empty list")
    rules = []
    for i, rd in enumerate(raw_rules):
        where = f"rules[{i}]."
        if not isinstance(rd, dict):
            raise ModelError(f"rules[{i}]: must be an object")
        if "A" in rd:
            if "A_lower" in rd or "A_upper" in rd:
                raise ModelError(f"{where}A: give either A or A_lower/A_upper, not both")
            a = IntervalMatrix.exact(_matrix_field(rd, "A", where))
        else:
            if "A_lower" not in rd and "A_upper" not in rd:
                raise ModelError(f"{where}A: missing required field (or A_lower/A_upper)")
            lo = _matrix_field(rd, "A_lower", where)
            up = _matrix_field(rd, "A_upper", where)
            if lo.shape != up.shape:
                raise ModelError(f"dimension mismatch: {where}A_lower {lo.shape} vs A_upper {up.shape}")
            try:
                a = IntervalMatrix(lo, up)
            except ModelError as exc:
                raise ModelError(f"{where}A_lower/A_upper: {exc}") from None
        membership = _field(rd, "membership", where)
        if not isinstance(membership, str):
            raise ModelError(f"{where}membership: must be a string")
        rules.append(
            Rule(a, _matrix_field(rd, "B", where), _matrix_field(rd, "C", where), _matrix_field(rd, "D", where), membership)
        )
    return FuzzyModel(dims["n"], dims["m"], dims["l"], premise, tuple(rules), (float(z_range[0]), float(z_range[1])))


def model_to_dict(model: FuzzyModel, include_default_range: bool = False) -> dict:
    rules = []
    for rule in model.rules:
        rd = {"membership": rule.membership}
        if rule.A.is_exact:
            rd["A"] = rule.A.lower.tolist()
        else:
            rd["A_lower"] = rule.A.lower.tolist()
            rd["A_upper"] = rule.A.upper.tolist()
        rd.update(B=rule.B.tolist(), C=rule.C.tolist(), D=rule.D.tolist())
        rules.append(rd)
    out = {"n": model.n, "m": model.m, "l": model.l, "premise": model.premise, "rules": rules}
    if include_default_range or tuple(model.z_range) != (-1.0, 1.0):
        out["z_range"] = list(model.z_range)
    return out


def _floatify(obj):
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, (int, float)):
        return float(obj)
    if isinstance(obj, dict):
        return {k: v if k in ("n", "m", "l") else _floatify(v) for k, v in obj.items()}
    return [_floatify(v) for v in obj]


def canonical_json(obj) -> str:
    """Sorted keys, two-space indent, every matrix entry written as a float (repr)."""
    return json.dumps(_floatify(obj), sort_keys=True, indent=2) + "\n"


def load_model(path) -> FuzzyModel:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ModelError(f"cannot read {path}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelError(f"{path}: invalid JSON ({exc})") from None
    return model_from_dict(data)


def save_model(model: FuzzyModel, path) -> None:
    Path(path).write_text(canonical_json(model_to_dict(model)))
