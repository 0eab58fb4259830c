#!/usr/bin/env python3
"""Sweep the speed parameter and record the best CHSH value per model.

Writes one CSV per model (or prints to stdout) with the searched minimum S,
the minimizing angles and the violation flag at each speed.  Useful for
reproducing the violation-versus-speed picture in one shot.

Usage:
    python scripts/sweep_speeds.py --betas 0:0.95:0.05 --grid-step 5 --out-dir results/
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from spincorr.chsh import SearchSettings, beta_scan, scan_csv, violation_fraction
from spincorr.closed_form import CorrelationModel
from spincorr.kinematics import Speed


def parse_range(spec: str) -> list[float]:
    lo, hi, step = (float(p) for p in spec.split(":"))
    values = []
    k = 0
    while lo + k * step <= hi + 1e-12:
        values.append(lo + k * step)
        k += 1
    return values


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--betas", default="0:0.95:0.05", help="lo:hi:step sweep range")
    parser.add_argument("--grid-step", type=float, default=5.0)
    parser.add_argument("--out-dir", default=None, help="write CSVs here instead of stdout")
    args = parser.parse_args()

    speeds = [Speed(b) for b in parse_range(args.betas)]
    settings = SearchSettings(grid_step_deg=args.grid_step)
    for model in CorrelationModel:
        rows = beta_scan(model, speeds, settings)
        text = scan_csv(rows)
        if args.out_dir:
            out = Path(args.out_dir)
            out.mkdir(parents=True, exist_ok=True)
            target = out / f"sweep_{model.value}.csv"
            target.write_text(text)
            print(f"{model.value}: wrote {target}", file=sys.stderr)
        else:
            sys.stdout.write(text)
        print(
            f"{model.value}: best S over sweep = {min(r.s_value for r in rows):.6f}, "
            f"violation fraction = {violation_fraction(rows):.3f}",
            file=sys.stderr,
        )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
