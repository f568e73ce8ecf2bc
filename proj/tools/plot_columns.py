#!/usr/bin/env python3
"""Turn an experiment CSV into whitespace-separated gnuplot columns.

Rows are grouped by the key columns (by default every non-numeric column plus
`sigma`), one gnuplot data block per group, separated by two blank lines so
that `index N` selects a group.

    tools/plot_columns.py out/fig1.csv --x t --y primal_gap dual_gap > fig1.dat
    gnuplot -e "set logscale y; plot for [i=0:5] 'fig1.dat' index i using 1:2 with lines"
"""

import argparse
import csv
import sys


def is_number(text):
    try:
        float(text)
        return True
    except ValueError:
        return False


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("csv", help="input CSV with a header row")
    ap.add_argument("--x", default=None, help="abscissa column (default: first numeric column)")
    ap.add_argument("--y", nargs="*", default=None, help="ordinate columns (default: all remaining numeric)")
    ap.add_argument("--group", nargs="*", default=None, help="key columns (default: non-numeric columns and sigma)")
    args = ap.parse_args(argv)

    with open(args.csv, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        return 0
    header = list(rows[0].keys())
    numeric = [c for c in header if all(is_number(r[c]) or r[c] in ("nan", "inf", "-inf", "") for r in rows)]

    group = args.group
    if group is None:
        group = [c for c in header if c not in numeric or c == "sigma"]
    x = args.x or next(c for c in numeric if c not in group)
    ys = args.y or [c for c in numeric if c not in group and c != x]
    for c in [x, *ys, *group]:
        if c not in header:
            ap.error(f"unknown column {c!r}; have {', '.join(header)}")

    blocks = {}
    for r in rows:
        blocks.setdefault(tuple(r[g] for g in group), []).append(r)

    out = sys.stdout
    for i, (key, block) in enumerate(blocks.items()):
        if i:
            out.write("\n\n")
        label = " ".join(f"{g}={v}" for g, v in zip(group, key))
        out.write(f"# index {i}: {label}\n# {x} {' '.join(ys)}\n")
        for r in block:
            out.write(" ".join(r[c] if r[c] != "" else "nan" for c in [x, *ys]) + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
