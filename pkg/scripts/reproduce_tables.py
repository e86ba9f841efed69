#!/usr/bin/env python3
"""Print the error tables for the three built-in examples next to the published values.

    python3 scripts/reproduce_tables.py            # Markdown to stdout
    python3 scripts/reproduce_tables.py --csv out  # also write one CSV per table into out/
"""

import argparse
import sys
from pathlib import Path

from rpsm.analysis import build_report, report_to_csv

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))
from test_acceptance import EX1_EXT, EX2_EXT, EX3_K10, GRID, within_band  # noqa: E402

TABLES = [
    # (name, example, K, {(i, metric): published})
    ("example1_K4", 1, 4, {(i, "ext"): EX1_EXT[i, 4] for i in (1, 2)}),
    ("example1_K6", 1, 6, {(i, "ext"): EX1_EXT[i, 6] for i in (1, 2)}),
    ("example2_K2", 2, 2, {(i, "ext"): EX2_EXT[i, 2] for i in (1, 2)}),
    ("example2_K3", 2, 3, {(i, "ext"): EX2_EXT[i, 3] for i in (1, 2)}),
    ("example3_K10", 3, 10, {(i, m): v for i in (1, 2, 3) for m, v in EX3_K10[i].items()}),
]


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--csv", metavar="DIR", help="write full-precision CSV reports here")
    args = p.parse_args(argv)

    from rpsm.builtin import example
    out_dir = Path(args.csv) if args.csv else None
    if out_dir:
        out_dir.mkdir(parents=True, exist_ok=True)
    misses = 0
    for name, number, K, published in TABLES:
        system, init = example(number)
        rep = build_report(system, init, K, GRID)
        if out_dir:
            (out_dir / f"{name}.csv").write_text(report_to_csv(rep))
        print(f"## {name}\n")
        print("| u | metric | t | computed | published | ok |")
        print("|---|--------|---|----------|-----------|----|")
        for (i, metric), values in published.items():
            for t, want in zip(GRID, values):
                got = rep.row(i, t).get(metric)
                ok = within_band(got, want, 0.05 if metric == "res" else 0.01)
                misses += not ok
                print(f"| {i} | {metric} | {t} | {got:.5e} | {want:.5e} | {'yes' if ok else 'NO'} |")
        print()
    print(f"{misses} cell(s) outside the tolerance band")
    return 0


if __name__ == "__main__":
    sys.exit(main())
