#!/usr/bin/env python3
"""Run the full experiment set into out/<experiment>/ directories.

Defaults match the headline experiment sizes (100 runs of 10^4
iterations); pass --quick for a fast smoke pass.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from mcstat.harness import ExperimentConfig, run_experiment


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", type=Path,
                        default=Path(__file__).resolve().parent.parent / "out")
    parser.add_argument("--quick", action="store_true",
                        help="10 runs of 1000 iterations instead of 100 x 10000")
    args = parser.parse_args()

    runs, iters = (10, 1000) if args.quick else (100, 10_000)
    configs = [
        ExperimentConfig("figure1", seed=args.seed, runs=runs, iters=iters,
                         mu=0.0, out_dir=args.out / "figure1_mu0"),
        ExperimentConfig("figure1", seed=args.seed, runs=runs, iters=iters,
                         mu=2.5, out_dir=args.out / "figure1_mu2.5"),
        ExperimentConfig("figure2", seed=args.seed, runs=runs, iters=iters,
                         out_dir=args.out / "figure2"),
        ExperimentConfig("figure3", seed=args.seed, runs=runs, iters=iters,
                         scale="auto", out_dir=args.out / "figure3"),
        ExperimentConfig("evidence", seed=args.seed, runs=runs, iters=iters,
                         out_dir=args.out / "evidence"),
    ]
    for config in configs:
        t0 = time.time()
        result = run_experiment(config)
        keys = ("mu", "reference_value", "scale", "measured_acceptance",
                "tv_distance", "terminal_band_width", "analytic_log_bf")
        report = ", ".join(f"{k}={result.info[k]:.5g}" for k in keys
                           if k in result.info and isinstance(result.info[k], float))
        print(f"{config.experiment} -> {config.out_dir}  [{time.time() - t0:.1f}s]  {report}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
