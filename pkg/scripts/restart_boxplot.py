"""Spread of converged fidelities over random restarts (8 sites)."""
import argparse
import csv
import os
from dataclasses import asdict

from mtevo.experiments import ExperimentConfig, optimize_mte


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--steps", type=int, nargs="+", default=[10, 20])
    ap.add_argument("--restarts", type=int, default=20)
    ap.add_argument("--out", default="out/boxplot")
    args = ap.parse_args()
    os.makedirs(args.out, exist_ok=True)
    with open(os.path.join(args.out, "boxplot.csv"), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["N", "runs", "converged", "median", "q1", "q3", "whisker_low", "whisker_high", "median_iterations"])
        for N in args.steps:
            cfg = ExperimentConfig(n_sites=8, n_steps=N, restarts=args.restarts, plots=False, out_dir=args.out)
            _, reports, stats = optimize_mte(cfg.model(), cfg, N)
            ok = [r for r in reports if r.converged]
            its = sorted(r.iterations for r in ok)
            row = [N, len(reports), len(ok)]
            if stats is not None:
                d = asdict(stats)
                row += [d["median"], d["q1"], d["q3"], d["whisker_low"], d["whisker_high"], its[len(its) // 2]]
            w.writerow(row)
            print(row, flush=True)


if __name__ == "__main__":
    main()
