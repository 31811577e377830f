"""Command-line front end: train, eval, sweep, calibrate, beampattern.

Exit codes: 0 success, 1 validation problem (bad flags, bad config, missing
files), 2 runtime failure (training divergence, I/O trouble mid-run).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from isacsim.arrays import ArrayGeometry, perturb_geometry
from isacsim.baselines import multibeam
from isacsim.config import ExperimentConfig, load_config
from isacsim.evaluation import (
    AeSystem,
    BaselineSystem,
    baseline_beams,
    calibrate_threshold,
    evaluate_system,
    h0_score_source,
    sweep_baseline,
    train_and_evaluate_ae,
    write_beampattern_csv,
    write_results_csv,
)
from isacsim.model import load_model, save_model
from isacsim.rng import Rng
from isacsim.training import TrainingDiverged, train, write_training_log


class _Parser(argparse.ArgumentParser):
    """argparse with usage errors mapped to the validation exit code."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _float_list(raw: str) -> list:
    return [float(p) for p in raw.replace(",", " ").split() if p]


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="isacsim", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--config", type=Path, help="INI config file")
        p.add_argument("--seed", type=int, help="override the configured seed")
        p.add_argument("--out", type=Path, help="output directory")

    p_train = sub.add_parser("train", help="train one model end to end")
    common(p_train)
    p_train.add_argument("--omega-r", type=float, help="radar weight in [0, 1]")

    p_eval = sub.add_parser("eval", help="place one system on the trade-off plane")
    common(p_eval)
    p_eval.add_argument("--checkpoint", type=Path, help="trained model to evaluate")
    p_eval.add_argument("--omega-r", type=float,
                        help="radar weight the checkpoint was trained at "
                             "(labels the results row; defaults to the configured value)")
    p_eval.add_argument("--baseline", action="store_true", help="evaluate the benchmark")
    p_eval.add_argument("--rho", type=float, default=1.0, help="benchmark radar fraction")
    p_eval.add_argument("--phi", type=float, default=0.0, help="benchmark combining phase")
    p_eval.add_argument("--trials", type=int, help="test scenes for this point")
    p_eval.add_argument("--impaired", action="store_true",
                        help="propagate through the frozen perturbed array")
    p_eval.add_argument("--sigma-lambda-frac", type=float,
                        help="gap standard deviation as a fraction of wavelength")
    p_eval.add_argument("--beampattern", action="store_true",
                        help="also write the transmit beampattern CSV")

    p_sweep = sub.add_parser("sweep", help="trade-off sweeps for AE and/or benchmark")
    common(p_sweep)
    p_sweep.add_argument("--ae", action="store_true", help="sweep the autoencoder")
    p_sweep.add_argument("--baseline", action="store_true", help="sweep the benchmark")
    p_sweep.add_argument("--omegas", type=_float_list, help="comma list of omega_r values")
    p_sweep.add_argument("--rhos", type=_float_list, help="comma list of rho values")
    p_sweep.add_argument("--phis", type=_float_list, help="comma list of phi values")
    p_sweep.add_argument("--trials", type=int, help="test scenes per point")
    p_sweep.add_argument("--impaired", action="store_true",
                         help="run the frozen perturbed-array experiment")
    p_sweep.add_argument("--sigma-lambda-frac", type=float,
                         help="gap standard deviation as a fraction of wavelength")

    p_cal = sub.add_parser("calibrate", help="threshold at the target false-alarm rate")
    common(p_cal)
    p_cal.add_argument("--checkpoint", type=Path)
    p_cal.add_argument("--baseline", action="store_true")
    p_cal.add_argument("--rho", type=float, default=1.0)
    p_cal.add_argument("--phi", type=float, default=0.0)
    p_cal.add_argument("--trials", type=int, help="calibration scenes")

    p_beam = sub.add_parser("beampattern", help="write a transmit beampattern CSV")
    common(p_beam)
    p_beam.add_argument("--checkpoint", type=Path)
    p_beam.add_argument("--baseline", action="store_true")
    p_beam.add_argument("--rho", type=float, default=1.0)
    p_beam.add_argument("--phi", type=float, default=0.0)

    return parser


def _load(args) -> ExperimentConfig:
    if args.config is not None and not Path(args.config).exists():
        raise FileNotFoundError(f"config file not found: {args.config}")
    return load_config(args.config)


def _outdir(args, cfg: ExperimentConfig) -> Path:
    out = Path(args.out) if args.out is not None else Path(cfg.paths.results_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out

def _geometries(args, cfg: ExperimentConfig):
    """(propagation geometry, design geometry) honoring --impaired."""
    nominal = cfg.to_geometry()
    if not getattr(args, "impaired", False):
        return nominal, nominal
    frac = args.sigma_lambda_frac
    if frac is None:
        frac = cfg.impairment.sigma_lambda_fraction
    if frac < 0:
        raise ValueError("--sigma-lambda-frac must be nonnegative")
    rng = Rng(cfg.impairment.geometry_seed).derive("geometry")
    impaired = perturb_geometry(rng, frac * cfg.scenario.wavelength,
                                cfg.scenario.num_antennas, cfg.scenario.wavelength)
    return impaired, nominal


def _build_system(args, cfg: ExperimentConfig, design_geom: ArrayGeometry):
    scenario = cfg.to_scenario()
    if args.baseline and args.checkpoint:
        raise ValueError("choose either --baseline or --checkpoint, not both")
    if args.baseline:
        if not 0.0 <= args.rho <= 1.0:
            raise ValueError("--rho must lie in [0, 1]")
        y_r, y_c = baseline_beams(scenario, design_geom)
        beam = multibeam(y_r, y_c, args.rho, args.phi, scenario.energy_budget)
        return BaselineSystem(beam, design_geom, scenario.target_angle_range,
                              knob=("rho_phi", args.rho, args.phi))
    if not args.checkpoint:
        raise ValueError("need --checkpoint PATH or --baseline")
    if not Path(args.checkpoint).exists():
        raise FileNotFoundError(f"checkpoint not found: {args.checkpoint}")
    omega = getattr(args, "omega_r", None)
    if omega is None:
        omega = cfg.training.omega_r
    elif not 0.0 <= omega <= 1.0:
        raise ValueError("--omega-r must lie in [0, 1]")
    model = load_model(args.checkpoint, scenario)
    return AeSystem(model, knob=("omega_r", omega, None))


def cmd_train(args) -> int:
    cfg = _load(args)
    omega = args.omega_r if args.omega_r is not None else cfg.training.omega_r
    if not 0.0 <= omega <= 1.0:
        raise ValueError("--omega-r must lie in [0, 1]")
    plan = cfg.to_plan(omega_r=omega, seed=args.seed)
    out = _outdir(args, cfg)
    model, rows = train(plan, cfg.to_scenario(), cfg.to_geometry())
    tag = f"ae_omega{omega:g}_seed{plan.seed}"
    ckpt, log = out / f"{tag}.ckpt", out / f"{tag}_log.csv"
    save_model(ckpt, model)
    write_training_log(log, rows)
    print(f"wrote {ckpt}")
    print(f"wrote {log}")
    return 0


def cmd_eval(args) -> int:
    cfg = _load(args)
    geom, design = _geometries(args, cfg)
    system = _build_system(args, cfg, design)
    seed = args.seed if args.seed is not None else cfg.training.seed
    opts = cfg.eval_options(args.trials)
    point, _ = evaluate_system(system, cfg.to_scenario(), geom, seed, opts)
    out = _outdir(args, cfg)
    kind = "baseline" if args.baseline else "ae"
    path = out / f"eval_{kind}.csv"
    write_results_csv(path, [point])
    print(f"wrote {path}")
    if args.beampattern:
        bp = out / f"beampattern_{kind}.csv"
        write_beampattern_csv(bp, design, system.beam)
        print(f"wrote {bp}")
    return 0


def cmd_sweep(args) -> int:
    cfg = _load(args)
    scenario = cfg.to_scenario()
    seed = args.seed if args.seed is not None else cfg.training.seed
    opts = cfg.eval_options(args.trials)
    out = _outdir(args, cfg)
    run_ae, run_baseline = args.ae, args.baseline
    if not run_ae and not run_baseline:
        run_ae = run_baseline = True
    rho_phi = None
    if args.rhos or args.phis:
        rhos = args.rhos if args.rhos else [1.0]
        phis = args.phis if args.phis else [0.0]
        rho_phi = [(r, p) for r in rhos for p in phis]
    omegas = args.omegas if args.omegas else [cfg.training.omega_r]
    plan = cfg.to_plan(seed=seed)

    suffix = ""
    design = geom = cfg.to_geometry()
    if args.impaired:
        frac = args.sigma_lambda_frac
        if frac is None:
            frac = cfg.impairment.sigma_lambda_fraction
        if frac < 0:
            raise ValueError("--sigma-lambda-frac must be nonnegative")
        geom_rng = Rng(cfg.impairment.geometry_seed).derive("geometry")
        geom = perturb_geometry(geom_rng, frac * cfg.scenario.wavelength,
                                cfg.scenario.num_antennas, cfg.scenario.wavelength)
        suffix = "_impaired"

    if run_baseline:
        points = sweep_baseline(rho_phi, scenario, geom, seed=seed,
                                design_geom=design, opts=opts)
        path = out / f"sweep_baseline{suffix}.csv"
        write_results_csv(path, points)
        print(f"wrote {path}")
    if run_ae:
        points = []
        for i, omega in enumerate(omegas):
            model, point, _ = train_and_evaluate_ae(omega, plan, scenario, geom, i, opts)
            ckpt = out / f"ae_omega{omega:g}_seed{plan.seed + i}{suffix}.ckpt"
            save_model(ckpt, model)
            print(f"wrote {ckpt}")
            points.append(point)
        path = out / f"sweep_ae{suffix}.csv"
        write_results_csv(path, points)
        print(f"wrote {path}")
    return 0


def cmd_calibrate(args) -> int:
    cfg = _load(args)
    _, design = _geometries(args, cfg)
    system = _build_system(args, cfg, design)
    seed = args.seed if args.seed is not None else cfg.training.seed
    n = args.trials if args.trials is not None else cfg.evaluation.calibration_trials
    source = h0_score_source(system, cfg.to_scenario(), Rng(seed).derive("calibration"))
    result = calibrate_threshold(source, cfg.evaluation.pfa_target, n)
    print(
        f"threshold={result.threshold:.10g} target_pfa={result.target_pfa:g} "
        f"achieved_pfa={result.achieved_pfa:.6g} trials={result.n_calibration_trials}"
    )
    return 0


def cmd_beampattern(args) -> int:
    cfg = _load(args)
    design = cfg.to_geometry()
    system = _build_system(args, cfg, design)
    out = _outdir(args, cfg)
    kind = "baseline" if args.baseline else "ae"
    path = out / f"beampattern_{kind}.csv"
    write_beampattern_csv(path, design, system.beam)
    print(f"wrote {path}")
    return 0


_COMMANDS = {
    "train": cmd_train,
    "eval": cmd_eval,
    "sweep": cmd_sweep,
    "calibrate": cmd_calibrate,
    "beampattern": cmd_beampattern,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, FileNotFoundError, NotADirectoryError) as exc:
        print(f"isacsim: {exc}", file=sys.stderr)
        return 1
    except (TrainingDiverged, OSError, np.linalg.LinAlgError) as exc:
        print(f"isacsim: runtime failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
