"""Best-of-K infidelity against step count, MTE and translated QAOA."""
import argparse
import json

from mtevo.experiments import ExperimentConfig, infidelity_vs_steps


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-sites", type=int, default=8)
    ap.add_argument("--steps", type=int, nargs="+", default=[5, 10, 15, 20, 30])
    ap.add_argument("--restarts", type=int, default=10)
    ap.add_argument("--out", default="out/sweep")
    ap.add_argument("--no-plots", action="store_true")
    args = ap.parse_args()
    cfg = ExperimentConfig(kind="sweep", n_sites=args.n_sites, sweep_steps=args.steps,
                           restarts=args.restarts, out_dir=args.out, plots=not args.no_plots)
    print(json.dumps(infidelity_vs_steps(cfg), indent=2))


if __name__ == "__main__":
    main()
