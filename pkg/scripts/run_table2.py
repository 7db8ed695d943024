#!/usr/bin/env python3
"""Noise study: Pconf vs Weighted when confidences come from a fitted model."""

import argparse

from _table import print_table
from pconf.harness import ExperimentConfig, Method, Study, run_study


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out", default="results/noise")
    args = ap.parse_args()
    cfg = ExperimentConfig(study=Study.NOISE, trials=args.trials, seed=args.seed, jobs=args.jobs)
    _, summary = run_study(cfg, args.out)
    print_table(summary, [Method.PCONF.value, Method.WEIGHTED.value])
    print(f"\nCSV files written to {args.out}/")


if __name__ == "__main__":
    main()
