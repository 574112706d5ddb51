#!/usr/bin/env python3
"""Map the cutoff bound over interferometer mass and flight time.

Writes a CSV grid of lambda bounds and prints the reference experiment's
full report.  Purely analytic, runs instantly.
"""
import argparse
import json
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from confdec.bounds import ExperimentParams, bound_report, lambda_bound
from confdec.io import write_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--mass-range", type=float, nargs=2, default=[10.0, 1e7],
                    metavar=("LO", "HI"), help="mass window in amu")
    ap.add_argument("--time-range", type=float, nargs=2, default=[1e-3, 10.0],
                    metavar=("LO", "HI"), help="flight-time window in s")
    ap.add_argument("--points", type=int, default=25, help="grid points per axis")
    ap.add_argument("--contrast-loss", type=float, default=0.03)
    ap.add_argument("--out", default="bound_landscape.csv")
    args = ap.parse_args()

    masses = np.geomspace(*args.mass_range, args.points)
    times = np.geomspace(*args.time_range, args.points)
    rows = [(m, t, lambda_bound(ExperimentParams(m, t, args.contrast_loss)))
            for m in masses for t in times]
    write_csv(args.out, ["mass[amu]", "flight_time[s]", "lambda_bound[1]"], rows)
    print(f"wrote {args.out} ({len(rows)} rows)")

    reference = ExperimentParams(132.9, 0.32, args.contrast_loss)
    print(json.dumps(bound_report(reference, reference_bound=18.0), indent=2,
                     sort_keys=True))


if __name__ == "__main__":
    main()
