"""Local-adiabatic ramp and linear comparator for the 12-site chain."""
import argparse
import json

from mtevo.experiments import ExperimentConfig, run_local_adiabatic_baseline


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-sites", type=int, default=12)
    ap.add_argument("--rho", type=float, default=10.0)
    ap.add_argument("--dt", type=float, default=0.01)
    ap.add_argument("--out", default="out/la_baseline")
    ap.add_argument("--no-plots", action="store_true")
    args = ap.parse_args()
    cfg = ExperimentConfig(kind="la-baseline", n_sites=args.n_sites, rho=args.rho, dt=args.dt,
                           out_dir=args.out, plots=not args.no_plots)
    print(json.dumps(run_local_adiabatic_baseline(cfg), indent=2))


if __name__ == "__main__":
    main()
