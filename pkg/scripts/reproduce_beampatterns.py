"""Write transmit beampattern CSVs for trained models and benchmark beams.

Trains one model per requested omega_r (about 20 s each at the defaults) and
evaluates nothing: the point here is only the radiated energy over angle.
Benchmark patterns come from the multibeam combiner at the requested radar
fractions with phi = 0.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from isacsim.arrays import ArrayGeometry
from isacsim.baselines import multibeam
from isacsim.channels import ScenarioConfig
from isacsim.evaluation import baseline_beams, write_beampattern_csv
from isacsim.model import save_model, transmit
from isacsim.training import TrainingPlan, train


def parse_args(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, default=Path("runs/beampatterns"))
    parser.add_argument("--omegas", type=float, nargs="+", default=[0.0, 0.09, 1.0])
    parser.add_argument("--rhos", type=float, nargs="+", default=[1.0, 0.5, 0.0])
    parser.add_argument("--samples", type=int, default=2_000_000)
    parser.add_argument("--batch-size", type=int, default=1_000)
    parser.add_argument("--seed", type=int, default=0)
    return parser.parse_args(argv)


def main(argv=None) -> int:
    args = parse_args(argv)
    args.out.mkdir(parents=True, exist_ok=True)
    cfg = ScenarioConfig()
    geom = ArrayGeometry.nominal(cfg.num_antennas)

    y_r, y_c = baseline_beams(cfg, geom)
    for rho in args.rhos:
        beam = multibeam(y_r, y_c, rho, 0.0, cfg.energy_budget)
        path = args.out / f"beampattern_baseline_rho{rho:g}.csv"
        write_beampattern_csv(path, geom, beam)
        print(f"wrote {path}")

    for i, omega in enumerate(args.omegas):
        plan = TrainingPlan(omega_r=omega, batch_size=args.batch_size,
                            total_samples=args.samples, seed=args.seed + i)
        model, _ = train(plan, cfg, geom)
        ckpt = args.out / f"ae_omega{omega:g}_seed{plan.seed}.ckpt"
        save_model(ckpt, model)
        _, v, _ = transmit(model, np.arange(cfg.modulation_size))
        path = args.out / f"beampattern_ae_omega{omega:g}.csv"
        write_beampattern_csv(path, geom, v)
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
