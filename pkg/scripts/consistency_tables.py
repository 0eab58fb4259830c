#!/usr/bin/env python3
"""Tabulate the oracle fits against the closed-form weights.

For each requested speed this prints, per model, the fitted template
coefficients (rescaled for comparison), the closed-form ones, the relative
deviations and the validation residual, followed by the trace-expression
versus spin-average cross check.  Nothing here asserts; the tables are the
deliverable.

Usage:
    python scripts/consistency_tables.py --betas 0.3 0.6 0.9
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from spincorr.closed_form import CorrelationModel
from spincorr.kinematics import BETA_ORACLE_MAX, Speed
from spincorr.oracle import consistency_report, cross_check_unpolarized


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--betas", type=float, nargs="+", default=[0.3, 0.6, 0.9])
    args = parser.parse_args()

    for beta in args.betas:
        speed = Speed(min(beta, BETA_ORACLE_MAX))
        print(f"=== beta = {speed.beta:g} ===")
        for model in CorrelationModel:
            rep = consistency_report(model, speed)
            rescaled = [c / rep.scale for c in rep.fitted] if rep.scale else rep.fitted
            print(f"  {model.value}:")
            print(f"    fitted/scale   {[f'{c:+.6f}' for c in rescaled]}")
            print(f"    closed form    {[f'{c:+.6f}' for c in rep.printed]}")
            print(f"    rel deviation  {[f'{d:.2e}' for d in rep.relative_deviation]}")
            print(f"    residual {rep.residual:.3e}  scale {rep.scale:+.6e}  "
                  f"verdict {'agree' if rep.verdict else 'disagree'}")
        cross = cross_check_unpolarized(speed)
        print(f"  cross check: scale {cross.scale:+.6e}, "
              f"max rel deviation {cross.max_rel_deviation:.3e}, "
              f"{'agree' if cross.agree else 'disagree'}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
