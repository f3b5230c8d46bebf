"""Best-of-K BFGS optimization of a modulated schedule, then pruning.

Defaults give the 12-site, 50-step run; expect roughly an hour per restart
on one core.  ``--stop-at`` ends the sweep at the first converged restart
whose pruned schedule reaches that fidelity.
"""
import argparse
import json

from mtevo.experiments import ExperimentConfig, run_mte_experiment


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-sites", type=int, default=12)
    ap.add_argument("--steps", type=int, default=50)
    ap.add_argument("--restarts", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--driver", choices=["bfgs", "adam"], default="bfgs")
    ap.add_argument("--stop-at", type=float, default=None)
    ap.add_argument("--out", default="out/mte")
    ap.add_argument("--no-plots", action="store_true")
    args = ap.parse_args()
    cfg = ExperimentConfig(kind="mte", n_sites=args.n_sites, n_steps=args.steps, restarts=args.restarts,
                           seed=args.seed, driver=args.driver, stop_at_fidelity=args.stop_at,
                           out_dir=args.out, plots=not args.no_plots)
    print(json.dumps(run_mte_experiment(cfg), indent=2))


if __name__ == "__main__":
    main()
