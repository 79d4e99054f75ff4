"""Command-line front end: analyze, synthesize, verify, simulate, sweep.

Exit codes: 0 success / feasible / pass, 2 infeasible / fail, 1 usage or I/O error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import analysis, lp, synthesis
from .expr import ExprError
from .linalg import is_nonneg, perron_radius
from .model import ModelError, check_model_positivity, load_model
from .sim import REALIZATIONS, SimulationError, export_csv, simulate

EXIT_OK, EXIT_ERROR, EXIT_NEGATIVE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class RunReport:
    command: str
    verdicts: dict = field(default_factory=dict)
    artifacts_written: list = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(
            {"command": self.command, "verdicts": self.verdicts, "artifacts_written": self.artifacts_written},
            sort_keys=True,
            indent=2,
        )


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.6g}"
    if isinstance(v, list):
        return "[" + ", ".join(_fmt(x) for x in v) + "]"
    if v is None:
        return "-"
    return str(v)


def _print_human(report: RunReport) -> None:
    print(f"{report.command}:")

    def walk(d, indent):
        for key, value in d.items():
            if isinstance(value, dict):
                print(f"{' ' * indent}{key}:")
                walk(value, indent + 2)
            elif isinstance(value, list) and value and isinstance(value[0], dict):
                print(f"{' ' * indent}{key}:")
                for item in value:
                    print(f"{' ' * (indent + 2)}- " + ", ".join(f"{k}={_fmt(v)}" for k, v in item.items()))
            else:
                print(f"{' ' * indent}{key}: {_fmt(value)}")

    walk(report.verdicts, 2)
    for path in report.artifacts_written:
        print(f"  wrote {path}")


# ---------------------------------------------------------------- commands


def cmd_analyze(args) -> tuple[RunReport, int]:
    model = load_model(args.model)
    pos = check_model_positivity(model)
    rep = RunReport("analyze")
    rep.verdicts["interval_model"] = model.is_interval
    rep.verdicts["positive"] = pos.positive
    rep.verdicts["positivity_violations"] = pos.describe()
    any_feasible = False
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for variant in analysis.Variant:
            cert = analysis.certify_stability(model, variant)
            any_feasible |= cert is not None
            rep.verdicts[variant.value] = {
                "feasible": cert is not None,
                "p": None if cert is None else cert.p.tolist(),
                "margin": None if cert is None else cert.margin,
            }
    radii = []
    for rule in model.rules:
        a = rule.A.upper
        radii.append(perron_radius(a) if is_nonneg(a) else None)
    rep.verdicts["perron_radii"] = radii
    return rep, EXIT_OK if any_feasible else EXIT_NEGATIVE


def cmd_synthesize(args) -> tuple[RunReport, int]:
    model = load_model(args.model)
    rep = RunReport("synthesize")
    mode = args.mode
    if mode is None:
        mode = "robust" if model.is_interval else "standard"
        rep.verdicts["mode_auto_selected"] = True
    rep.verdicts["mode"] = mode
    result = synthesis.synthesize(model, mode)
    if result is None:
        rep.verdicts["feasible"] = False
        return rep, EXIT_NEGATIVE
    check = synthesis.verify_closed_loop(model, result)
    rep.verdicts.update(
        feasible=True,
        margin=result.margin,
        p=result.p.tolist(),
        K=result.K.tolist(),
        closed_loop_pass=check.passed,
        closed_loop_radii=check.radii,
    )
    if args.output:
        synthesis.save_gains(result, args.output)
        rep.artifacts_written.append(str(args.output))
    return rep, EXIT_OK


def cmd_verify(args) -> tuple[RunReport, int]:
    model = load_model(args.model)
    gains = synthesis.load_gains(args.gains)
    report = synthesis.verify_closed_loop(model, gains, check_output=args.check_output)
    rep = RunReport("verify")
    rep.verdicts["pass"] = report.passed
    rep.verdicts["vertices"] = [
        {
            "i": v.i + 1,
            "j": v.j + 1,
            "verdict": v.verdict.value,
            "radius": v.radius,
            **({"output_nonneg": v.output_nonneg} if args.check_output else {}),
        }
        for v in report.vertices
    ]
    return rep, EXIT_OK if report.passed else EXIT_NEGATIVE


def _parse_x0(text: str) -> np.ndarray:
    try:
        return np.array([float(v) for v in text.split(",")])
    except ValueError:
        raise UsageError(f"--x0 must be a comma-separated list of numbers, got {text!r}") from None


def cmd_simulate(args) -> tuple[RunReport, int]:
    model = load_model(args.model)
    x0 = _parse_x0(args.x0)
    if x0.size != model.n:
        raise UsageError(f"--x0 has {x0.size} entries, model has n = {model.n}")
    gains = synthesis.load_gains(args.gains) if args.gains else None
    if args.steps < 1:
        raise UsageError("--steps must be a positive integer")
    traj = simulate(model, gains, x0, args.steps, args.realization)
    rep = RunReport("simulate")
    norms = traj.norms()
    rep.verdicts.update(
        steps=args.steps,
        realization=args.realization,
        closed_loop=gains is not None,
        initial_norm=float(norms[0]),
        final_norm=float(norms[-1]),
        min_state=float(traj.x.min()),
    )
    if args.output:
        export_csv(traj, args.output)
        rep.artifacts_written.append(str(args.output))
    return rep, EXIT_OK


def cmd_sweep(args) -> tuple[RunReport, int]:
    if not 1 <= len(args.param) <= 2:
        raise UsageError("sweep takes one or two --param specs")
    model = load_model(args.model)
    data = json.loads(Path(args.model).read_text())
    region = synthesis.feasibility_region(data, args.param, args.mode, workers=args.workers)
    rep = RunReport("sweep")
    rep.verdicts.update(
        params={f"param{k + 1}": s.path for k, s in enumerate(region.specs)},
        grid_shape=list(region.feasible.shape),
        feasible_points=int(region.feasible.sum()),
        total_points=int(region.feasible.size),
        mode=args.mode or ("robust" if model.is_interval else "standard"),
    )
    if args.output:
        with Path(args.output).open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow([f"param{k + 1}" for k in range(len(region.specs))] + ["feasible"])
            for row in region.rows():
                w.writerow([format(v, ".12g") for v in row[:-1]] + [int(row[-1])])
        rep.artifacts_written.append(str(args.output))
    return rep, EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pfsyn", description="LP analysis and synthesis for positive T-S fuzzy systems")
    parser.add_argument("--json", action="store_true", help="print the report as JSON")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("analyze", help="positivity and open-loop stability certificates")
    p.add_argument("model")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("synthesize", help="compute PDC gains")
    p.add_argument("model")
    p.add_argument("--mode", choices=[m.value for m in synthesis.SynthesisMode])
    p.add_argument("-o", "--output", help="gains JSON to write")
    p.set_defaults(func=cmd_synthesize)

    p = sub.add_parser("verify", help="check closed-loop positivity and Schur stability")
    p.add_argument("model")
    p.add_argument("gains")
    p.add_argument("--check-output", action="store_true", help="also require C_i + D_i K_j >= 0")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("simulate", help="simulate and write a trajectory CSV")
    p.add_argument("model")
    p.add_argument("--gains")
    p.add_argument("--x0", required=True, help="comma-separated initial state")
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--realization", choices=REALIZATIONS, default="upper")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="synthesis feasibility over a parameter grid")
    p.add_argument("model")
    p.add_argument("--param", action="append", required=True, help='"rules[i].A[r][c]=start:stop:step"')
    p.add_argument("--mode", choices=[m.value for m in synthesis.SynthesisMode])
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_sweep)

    for sp in sub.choices.values():
        sp.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="print the report as JSON")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        lp.margin_threshold()
        report, code = args.func(args)
    except (UsageError, ModelError, ExprError, synthesis.SynthesisError, SimulationError, OSError, ValueError) as exc:
        print(f"pfsyn {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    if args.json:
        print(report.to_json())
    else:
        _print_human(report)
    return code


if __name__ == "__main__":
    sys.exit(main())
