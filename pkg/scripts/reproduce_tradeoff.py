"""Reproduce the radar/communication trade-off sweep on the nominal array.

Trains one model per omega_r at the desk budget, sweeps the benchmark over
its (rho, phi) grid under a shared detection threshold, and writes both
sweeps as results CSVs.  Roughly 15 minutes on one core at the defaults.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from isacsim.arrays import ArrayGeometry
from isacsim.channels import ScenarioConfig
from isacsim.evaluation import (
    EvalOptions,
    sweep_baseline,
    train_and_evaluate_ae,
    write_results_csv,
)
from isacsim.model import save_model
from isacsim.training import TrainingPlan

DEFAULT_OMEGAS = (0.0, 0.03, 0.09, 0.2, 0.4, 0.7, 1.0)


def parse_args(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, default=Path("runs/tradeoff"))
    parser.add_argument("--omegas", type=float, nargs="+", default=list(DEFAULT_OMEGAS))
    parser.add_argument("--trials", type=int, default=300_000,
                        help="test scenes per operating point")
    parser.add_argument("--calibration-trials", type=int, default=1_000_000)
    parser.add_argument("--samples", type=int, default=2_000_000,
                        help="training samples per model")
    # small batches: at the 2e6-sample budget the 10000 default leaves too few
    # Adam steps for the uncertainty head to recover from its early floor spike
    parser.add_argument("--batch-size", type=int, default=1_000)
    parser.add_argument("--seed", type=int, default=0)
    return parser.parse_args(argv)


def main(argv=None) -> int:
    args = parse_args(argv)
    args.out.mkdir(parents=True, exist_ok=True)
    cfg = ScenarioConfig()
    geom = ArrayGeometry.nominal(cfg.num_antennas)
    opts = EvalOptions(n_trials=args.trials, calibration_trials=args.calibration_trials)
    plan = TrainingPlan(batch_size=args.batch_size, total_samples=args.samples,
                        seed=args.seed)

    t0 = time.time()
    baseline_points = sweep_baseline(None, cfg, geom, seed=args.seed, opts=opts)
    path = args.out / "sweep_baseline.csv"
    write_results_csv(path, baseline_points)
    print(f"wrote {path} ({len(baseline_points)} points, {time.time() - t0:.0f}s)")

    ae_points = []
    for i, omega in enumerate(args.omegas):
        t0 = time.time()
        model, point, _ = train_and_evaluate_ae(omega, plan, cfg, geom, i, opts)
        ckpt = args.out / f"ae_omega{omega:g}_seed{args.seed + i}.ckpt"
        save_model(ckpt, model)
        ae_points.append(point)
        print(f"omega={omega:g}: Pd={point.pd:.4f} SER={point.ser:.5f} "
              f"RMSE={point.rmse_rad:.5f} rad ({time.time() - t0:.0f}s) -> {ckpt}")
    path = args.out / "sweep_ae.csv"
    write_results_csv(path, ae_points)
    print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
