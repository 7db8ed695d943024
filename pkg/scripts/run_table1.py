#!/usr/bin/env python3
"""Overlap study: accuracy of each method as the negative mean moves away."""

import argparse

from _table import print_table
from pconf.harness import ExperimentConfig, Method, Study, run_study


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out", default="results/overlap")
    args = ap.parse_args()
    cfg = ExperimentConfig(study=Study.OVERLAP, trials=args.trials, seed=args.seed, jobs=args.jobs)
    _, summary = run_study(cfg, args.out)
    print_table(summary, [m.value for m in Method])
    print(f"\nCSV files written to {args.out}/")


if __name__ == "__main__":
    main()
