"""Fidelity over a (lambda0, N) grid with a fixed geometric field ramp."""
import argparse
import json

import numpy as np

from mtevo.experiments import ExperimentConfig, run_constant_lambda


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-sites", type=int, default=8)
    ap.add_argument("--lambda-step", type=float, default=0.05)
    ap.add_argument("--out", default="out/const_lambda")
    ap.add_argument("--no-plots", action="store_true")
    args = ap.parse_args()
    grid = np.round(np.arange(0.1, 2.0 + 1e-9, args.lambda_step), 4).tolist()
    cfg = ExperimentConfig(kind="const-lambda", n_sites=args.n_sites, lambda0_grid=grid,
                           steps_grid=list(range(10, 131, 10)), out_dir=args.out, plots=not args.no_plots)
    print(json.dumps(run_constant_lambda(cfg), indent=2))


if __name__ == "__main__":
    main()
