#!/usr/bin/env python3
"""Plot p(t) per mask from one or more trajectories.csv files written by `wfpc`."""

import argparse
import csv
from collections import defaultdict

import matplotlib.pyplot as plt


def load(path):
    curves = defaultdict(lambda: ([], []))
    with open(path, newline="") as f:
        rows = (line for line in f if not line.startswith("#"))
        for row in csv.DictReader(rows):
            t, p = curves[int(row["mask_id"])]
            t.append(float(row["t"]))
            p.append(float(row["p"]))
    return curves


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("csv", nargs="+", help="trajectories.csv files")
    ap.add_argument("--offset", action="store_true", help="subtract p(0) from every curve")
    ap.add_argument("-o", "--output", help="write the figure here instead of showing it")
    args = ap.parse_args()

    fig, ax = plt.subplots(figsize=(7, 4))
    for path in args.csv:
        for mask, (t, p) in sorted(load(path).items()):
            y = [v - p[0] for v in p] if args.offset else p
            ax.plot(t, y, lw=0.8, label=f"{path}:{mask}" if len(args.csv) > 1 else f"mask {mask}")
    ax.set_xlabel("t")
    ax.set_ylabel("p(t) - p(0)" if args.offset else "p(t)")
    if sum(len(load(p)) for p in args.csv) <= 12:
        ax.legend(fontsize=7)
    fig.tight_layout()
    if args.output:
        fig.savefig(args.output, dpi=150)
    else:
        plt.show()


if __name__ == "__main__":
    main()
