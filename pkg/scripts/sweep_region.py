"""Synthesis feasibility over the (a, b) plane of the two-state sector model.

a is entry (2,1) of the first rule matrix and b the same entry of the
second; the original model sits at (0.6, 0.6).
"""

import argparse
import csv
import json
import time
from pathlib import Path

from pfsyn.synthesis import feasibility_region

ROOT = Path(__file__).resolve().parents[1]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--step", type=float, default=0.05)
    ap.add_argument("--stop", type=float, default=1.5)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", default="results/region.csv")
    args = ap.parse_args()

    template = json.loads((ROOT / "models" / "sin_sector_2state.json").read_text())
    specs = [f"rules[0].A[1][0]=0:{args.stop}:{args.step}", f"rules[1].A[1][0]=0:{args.stop}:{args.step}"]
    t0 = time.perf_counter()
    region = feasibility_region(template, specs, "standard", workers=args.workers)
    elapsed = time.perf_counter() - t0

    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["param1", "param2", "feasible"])
        for a, b, ok in region.rows():
            w.writerow([format(a, ".12g"), format(b, ".12g"), int(ok)])

    # coarse text map, a down the rows and b across
    for i, a in enumerate(region.axes[0]):
        print(f"{a:5.2f} " + "".join("#" if f else "." for f in region.feasible[i]))
    print(f"{int(region.feasible.sum())}/{region.feasible.size} feasible in {elapsed:.1f}s; wrote {out}")


if __name__ == "__main__":
    main()
