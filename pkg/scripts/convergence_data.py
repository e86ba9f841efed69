#!/usr/bin/env python3
"""Emit plot data for Example 2 on [0, 8]: truncated solutions against the closed form.

Writes two CSV files: ``sweep.csv`` (K, t, i, ext, value) over a fine grid and
``exact.csv`` (t, u1, u2).  No plotting library is needed to produce them.
"""

import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from rpsm.analysis import convergence_sweep, sweep_to_csv
from rpsm.builtin import example
from rpsm.expression import eval_point


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--out", default="convergence", help="output directory (default ./convergence)")
    p.add_argument("--orders", default="5,10,15,20,25")
    p.add_argument("--points", type=int, default=161, help="grid points on [0, 8]")
    args = p.parse_args(argv)

    orders = [int(k) for k in args.orders.split(",")]
    system, init = example(2)
    grid = np.linspace(0.0, init.t_end, args.points).tolist()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    rows = convergence_sweep(system, init, orders, grid)
    (out / "sweep.csv").write_text(sweep_to_csv(rows))
    with open(out / "exact.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "u1", "u2"])
        for t in grid:
            w.writerow([repr(t), *(repr(eval_point(e, t)) for e in system.exact)])

    at4 = [r for r in convergence_sweep(system, init, orders, [4.0])]
    for i in (1, 2):
        print(f"u{i}(4): " + ", ".join(f"K={r.K}: {r.ext:.3e}" for r in at4 if r.i == i))
    print(f"wrote {out / 'sweep.csv'} ({len(rows)} rows) and {out / 'exact.csv'}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
