"""Translate an optimized 8-site schedule to QAOA angles and re-optimize them.

Pass ``--schedule`` to start from a saved MTE schedule; otherwise one is
optimized first.  Writes the angle tables and the beta/gamma ratio against
the local-adiabatic field.
"""
import argparse
import json

from mtevo.experiments import ExperimentConfig, run_qaoa_experiment


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-sites", type=int, default=8)
    ap.add_argument("--steps", type=int, default=10)
    ap.add_argument("--restarts", type=int, default=3)
    ap.add_argument("--schedule")
    ap.add_argument("--translate-only", action="store_true")
    ap.add_argument("--out", default="out/qaoa")
    ap.add_argument("--no-plots", action="store_true")
    args = ap.parse_args()
    cfg = ExperimentConfig(kind="qaoa-optimize", n_sites=args.n_sites, n_steps=args.steps,
                           restarts=args.restarts, schedule_file=args.schedule,
                           out_dir=args.out, plots=not args.no_plots)
    print(json.dumps(run_qaoa_experiment(cfg, reoptimize=not args.translate_only), indent=2))


if __name__ == "__main__":
    main()
