"""Optimize an 8-site, 80-step schedule and decompose its trajectory.

The decomposition tracks the weight on the 11 lowest instantaneous
eigenstates of the ground-state sector after every step.
"""
import argparse
import json
import os

from mtevo.experiments import ExperimentConfig, run_decomposition, run_mte_experiment


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--steps", type=int, default=80)
    ap.add_argument("--restarts", type=int, default=3)
    ap.add_argument("--out", default="out/return_mechanism")
    ap.add_argument("--no-plots", action="store_true")
    args = ap.parse_args()
    opt = ExperimentConfig(kind="mte", n_sites=8, n_steps=args.steps, restarts=args.restarts,
                           out_dir=os.path.join(args.out, "mte"), plots=not args.no_plots)
    print(json.dumps(run_mte_experiment(opt), indent=2))
    dec = ExperimentConfig(kind="decompose", n_sites=8, out_dir=os.path.join(args.out, "decomposition"),
                           schedule_file=os.path.join(opt.out_dir, "schedule_pruned.json"),
                           plots=not args.no_plots)
    print(json.dumps(run_decomposition(dec), indent=2))


if __name__ == "__main__":
    main()
