"""Command-line entry point: ``mtevo <subcommand> [--config FILE] ...``."""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from .experiments import KINDS, RUNNERS, ExperimentConfig


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mtevo", description=__doc__)
    p.add_argument("kind", choices=KINDS)
    p.add_argument("--config", help="JSON experiment config")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="output directory")
    p.add_argument("--restarts", type=int)
    p.add_argument("--no-plots", action="store_true")
    p.add_argument("--n-sites", type=int)
    p.add_argument("--steps", type=int, help="initial MTE step count")
    p.add_argument("--driver", choices=["bfgs", "adam"])
    p.add_argument("--schedule", help="MTE schedule (CSV or JSON) for qaoa/decompose")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def config_from_args(args) -> ExperimentConfig:
    d = dict(vars(ExperimentConfig.from_json(args.config))) if args.config else {}
    d["kind"] = args.kind
    for key, val in (("seed", args.seed), ("out_dir", args.out), ("restarts", args.restarts),
                     ("n_sites", args.n_sites), ("n_steps", args.steps), ("driver", args.driver),
                     ("schedule_file", args.schedule)):
        if val is not None:
            d[key] = val
    if args.no_plots:
        d["plots"] = False
    return ExperimentConfig.from_dict(d)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(asctime)s %(name)s %(levelname)s %(message)s")
    try:
        cfg = config_from_args(args)
        os.makedirs(cfg.out_dir, exist_ok=True)
        cfg.to_json(os.path.join(cfg.out_dir, "config.json"))
        result = RUNNERS[cfg.kind](cfg)
    except Exception as err:  # noqa: BLE001 - report and exit nonzero
        logging.getLogger("mtevo").error("%s: %s", type(err).__name__, err)
        return 1
    json.dump(result, sys.stdout, indent=2, default=str)
    sys.stdout.write("\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
