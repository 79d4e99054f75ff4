"""Two-state sector model: open-loop divergence, synthesis, closed-loop runs.

Writes trajectory CSVs for the open loop, the published gains and the
gains found by the solver, and prints the verification summary.
"""

import argparse
from pathlib import Path

import numpy as np

from pfsyn import load_model, simulate, synthesize, verify_closed_loop
from pfsyn.linalg import perron_radius
from pfsyn.sim import export_csv
from pfsyn.synthesis import load_gains

ROOT = Path(__file__).resolve().parents[1]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results/sin_sector", help="output directory")
    ap.add_argument("--steps", type=int, default=60)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    model = load_model(ROOT / "models" / "sin_sector_2state.json")
    published = load_gains(ROOT / "models" / "sin_sector_2state_published_gains.json")
    x0 = np.array([0.01, 0.03])

    print("open-loop Perron radii:", [round(perron_radius(r.A.upper), 4) for r in model.rules])
    export_csv(simulate(model, None, x0, 20), out / "open_loop.csv")

    own = synthesize(model, "standard")
    print(f"own gains: K = {own.K[0].ravel()}  p = {own.p}  margin = {own.margin:.6g}")
    for name, gains in (("published", published), ("own", own)):
        rep = verify_closed_loop(model, gains)
        traj = simulate(model, gains, x0, args.steps)
        export_csv(traj, out / f"closed_loop_{name}.csv")
        ratio = np.linalg.norm(traj.x[-1]) / np.linalg.norm(x0)
        radii = ", ".join(f"{r:.4f}" for r in rep.radii)
        print(f"{name:>9}: pass={rep.passed}  radii=[{radii}]  |x(N)|/|x0| = {ratio:.3g}")
    print(f"wrote CSVs to {out}")


if __name__ == "__main__":
    main()
