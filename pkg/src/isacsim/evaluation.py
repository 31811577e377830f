"""Monte-Carlo evaluation: threshold calibration, trade-off points and sweeps.

A system under test exposes two things: held-out detector scores under the
target-absent hypothesis (for calibration) and per-scene responses
(score, theta_hat, sigma_hat, m_hat) for metric accumulation.  Calibration
and test always consume disjoint Rng streams; every metric reduces in fixed
chunk order, so any point is bit-for-bit reproducible from (seed, config).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace

import numpy as np

from isacsim.arrays import (
    ArrayGeometry,
    beampattern,
    perturb_geometry,
    sample_cn,
    steering_matrix,
)
from isacsim.baselines import (
    BeamSynthesisSpec,
    default_rho_phi_grid,
    ls_beam,
    maprt_statistic,
    ml_comm_detect,
    multibeam,
    qam4_constellation,
)
from isacsim.channels import ScenarioConfig, comm_forward, draw_scene, radar_forward
from isacsim.model import IsacModel, comm_receive, radar_receive, transmit
from isacsim.rng import Rng
from isacsim.training import TrainingPlan, train

EVAL_CHUNK = 25_000
MAPRT_GRID_SIZE = 2001

RESULTS_HEADER = (
    "knob_kind", "knob_value_1", "knob_value_2", "ser", "pd", "pfa_emp",
    "rmse_rad", "mean_sigma_hat", "n_trials", "seed",
)


@dataclass(frozen=True)
class TradeoffPoint:
    """One operating point of a system on the radar/communication plane.

    knob is ("omega_r", value, None) for the autoencoder or
    ("rho_phi", rho, phi) for the benchmark.  rmse_rad and mean_sigma_hat are
    None when no trial had a detected present target; n_detected logs the size
    of that conditioning set.
    """

    knob: tuple
    ser: float
    pd: float
    pfa_emp: float
    rmse_rad: float | None
    mean_sigma_hat: float | None
    n_trials: int
    seed: int
    n_detected: int = 0

    def __post_init__(self):
        if self.n_trials <= 0:
            raise ValueError("n_trials must be positive")
        for name in ("ser", "pd", "pfa_emp"):
            val = getattr(self, name)
            if not 0.0 <= val <= 1.0:
                raise ValueError(f"{name}={val} outside [0, 1]")
        if self.rmse_rad is not None and self.rmse_rad < 0.0:
            raise ValueError("rmse_rad must be nonnegative")


@dataclass(frozen=True)
class CalibrationResult:
    threshold: float
    target_pfa: float
    achieved_pfa: float
    n_calibration_trials: int


def calibrate_threshold(score_source, target_pfa: float, n_trials: int) -> CalibrationResult:
    """Empirical (1 - target_pfa) quantile of target-absent detector scores.

    score_source(n) must return n fresh scores under the absent hypothesis.
    Refuses when fewer than 100 exceedances are expected, and flags score
    distributions too degenerate to place the quantile.
    """
    if n_trials * target_pfa < 100:
        raise ValueError(
            f"{n_trials} trials at Pfa {target_pfa} leave the quantile too noisy"
        )
    chunks, remaining = [], n_trials
    while remaining > 0:
        take = min(EVAL_CHUNK, remaining)
        chunks.append(np.asarray(score_source(take), dtype=np.float64))
        remaining -= take
    scores = np.concatenate(chunks)
    if scores.min() == scores.max():
        raise ValueError("degenerate calibration scores: all values identical")
    k = min(max(int(np.floor((1.0 - target_pfa) * n_trials)), 0), n_trials - 1)
    threshold = float(np.partition(scores, k)[k])
    achieved = float(np.mean(scores > threshold))
    if not 0.5 * target_pfa <= achieved <= 1.5 * target_pfa:
        raise ValueError(
            f"degenerate threshold: in-sample Pfa {achieved} vs target {target_pfa}"
        )
    return CalibrationResult(threshold, target_pfa, achieved, n_trials)


# ------------------------------------------------------------------- systems

class AeSystem:
    """Adapter putting a trained model under the Monte-Carlo harness."""

    def __init__(self, model: IsacModel, knob: tuple):
        self.model = model
        self.knob = knob
        x, v, _ = transmit(model, np.arange(model.modulation_size))
        self.constellation = x
        self.beam = v

    def h0_scores(self, rng: Rng, n: int, noise_psd: float) -> np.ndarray:
        """Presence scores on noise-only radar observations."""
        noise = sample_cn(rng, noise_psd, (n, self.model.num_antennas))
        q, _, _ = radar_receive(self.model, noise)
        return q

    def respond(self, geom: ArrayGeometry, sample):
        x = self.constellation[sample.message]
        y = x[:, None] * self.beam[None, :]
        q, theta_hat, sigma_hat = radar_receive(self.model, radar_forward(geom, sample, y).z)
        obs = comm_forward(geom, sample, self.beam, x)
        m_hat = comm_receive(self.model, obs.z, obs.csi).argmax(axis=1)
        return q, theta_hat, sigma_hat, m_hat


class BaselineSystem:
    """Benchmark transmitter/receivers; design_geom is what the hardware was
    built for, which under impairments differs from the geometry signals
    actually propagate through (receive CSI is likewise reconstructed from the
    design-geometry steering vectors)."""

    def __init__(self, beam: np.ndarray, design_geom: ArrayGeometry,
                 target_sector: tuple, knob: tuple, n_grid: int = MAPRT_GRID_SIZE):
        self.beam = beam
        self.design_geom = design_geom
        self.angle_grid = np.linspace(target_sector[0], target_sector[1], n_grid)
        self.knob = knob
        self.constellation = qam4_constellation()

    def h0_scores(self, rng: Rng, n: int, noise_psd: float) -> np.ndarray:
        noise = sample_cn(rng, noise_psd, (n, self.design_geom.num_elements))
        stats, _ = maprt_statistic(noise, self.design_geom, self.angle_grid)
        return stats

    def respond(self, geom: ArrayGeometry, sample):
        x = self.constellation[sample.message]
        y = x[:, None] * self.beam[None, :]
        stats, theta_hat = maprt_statistic(
            radar_forward(geom, sample, y).z, self.design_geom, self.angle_grid
        )
        obs = comm_forward(geom, sample, self.beam, x)
        # CSI as the receiver believes it: true fading gain, design-geometry steering
        a_design = steering_matrix(self.design_geom, sample.rx_angle)
        kappa = sample.comm_gain * (a_design @ self.beam)
        m_hat = ml_comm_detect(obs.z, kappa, self.constellation)
        return stats, theta_hat, np.zeros(len(sample)), m_hat


def h0_score_source(system, cfg: ScenarioConfig, rng: Rng):
    """Calibration source: fresh target-absent scores drawn from rng."""
    return lambda n: system.h0_scores(rng, n, cfg.noise_psd)


# ------------------------------------------------------------------- metrics

def evaluate(system, cfg: ScenarioConfig, geom: ArrayGeometry, threshold: float,
             n_trials: int, rng: Rng) -> TradeoffPoint:
    """Accumulate SER / Pd / Pfa / conditional RMSE over n_trials fresh scenes.

    SER counts every trial; Pd only target-present trials; Pfa only
    target-absent ones; RMSE and mean sigma_hat only trials that were present
    AND detected.
    """
    n_err = n_t1 = n_det = n_t0 = n_fa = n_cond = 0
    sq_sum = sig_sum = 0.0
    remaining = n_trials
    while remaining > 0:
        take = min(EVAL_CHUNK, remaining)
        remaining -= take
        sample = draw_scene(rng, cfg, take)
        score, theta_hat, sigma_hat, m_hat = system.respond(geom, sample)
        detected = score > threshold
        present = sample.target_present
        n_err += int((m_hat != sample.message).sum())
        n_t1 += int(present.sum())
        n_t0 += int((~present).sum())
        n_det += int((detected & present).sum())
        n_fa += int((detected & ~present).sum())
        cond = detected & present
        n_cond += int(cond.sum())
        err = theta_hat[cond] - sample.target_angle[cond]
        sq_sum += float((err * err).sum())
        sig_sum += float(sigma_hat[cond].sum())
    return TradeoffPoint(
        knob=system.knob,
        ser=n_err / n_trials,
        pd=n_det / n_t1 if n_t1 else 0.0,
        pfa_emp=n_fa / n_t0 if n_t0 else 0.0,
        rmse_rad=float(np.sqrt(sq_sum / n_cond)) if n_cond else None,
        mean_sigma_hat=sig_sum / n_cond if n_cond else None,
        n_trials=n_trials,
        seed=rng.seed,
        n_detected=n_cond,
    )


# -------------------------------------------------------------------- sweeps

@dataclass(frozen=True)
class EvalOptions:
    n_trials: int = 300_000
    target_pfa: float = 0.01
    calibration_trials: int = 1_000_000


def evaluate_system(system, cfg: ScenarioConfig, geom: ArrayGeometry, seed: int,
                    opts: EvalOptions, threshold: float | None = None,
                    stream_index: int = 0):
    """Calibrate (unless a threshold is supplied) and evaluate one system."""
    root = Rng(seed)
    if threshold is None:
        source = h0_score_source(system, cfg, root.derive("calibration", stream_index))
        threshold = calibrate_threshold(source, opts.target_pfa, opts.calibration_trials).threshold
    point = evaluate(system, cfg, geom, threshold,
                     opts.n_trials, root.derive("evaluation", stream_index))
    return point, threshold


def train_and_evaluate_ae(omega_r: float, plan_template: TrainingPlan,
                          cfg: ScenarioConfig, geom: ArrayGeometry,
                          index: int = 0, opts: EvalOptions = EvalOptions()):
    """Train one model at omega_r (seed = base + index) and place it on the plane."""
    plan = replace(plan_template, omega_r=omega_r, seed=plan_template.seed + index)
    model, log = train(plan, cfg, geom)
    system = AeSystem(model, knob=("omega_r", omega_r, None))
    point, _ = evaluate_system(system, cfg, geom, plan.seed, opts)
    return model, point, log


def sweep_ae(omega_list, plan_template: TrainingPlan, cfg: ScenarioConfig,
             geom: ArrayGeometry, opts: EvalOptions = EvalOptions()) -> list:
    points = []
    for i, omega in enumerate(omega_list):
        _, point, _ = train_and_evaluate_ae(omega, plan_template, cfg, geom, i, opts)
        points.append(point)
    return points


def baseline_beams(cfg: ScenarioConfig, design_geom: ArrayGeometry):
    """Unit LS beams: each sector's beam nulls the other service sector."""
    y_r = ls_beam(BeamSynthesisSpec(design_geom, cfg.target_angle_range,
                                    cfg.rx_angle_range))
    y_c = ls_beam(BeamSynthesisSpec(design_geom, cfg.rx_angle_range,
                                    cfg.target_angle_range))
    return y_r, y_c


def sweep_baseline(rho_phi_grid, cfg: ScenarioConfig, geom: ArrayGeometry,
                   seed: int = 0, design_geom: ArrayGeometry | None = None,
                   opts: EvalOptions = EvalOptions()) -> list:
    """Benchmark sweep; one threshold serves every beam because the detector
    statistic under the absent hypothesis does not depend on the transmit beam."""
    design = geom if design_geom is None else design_geom
    y_r, y_c = baseline_beams(cfg, design)
    if rho_phi_grid is None:
        rho_phi_grid = default_rho_phi_grid()
    threshold = None
    points = []
    for i, (rho, phi) in enumerate(rho_phi_grid):
        beam = multibeam(y_r, y_c, rho, phi, cfg.energy_budget)
        system = BaselineSystem(beam, design, cfg.target_angle_range,
                                knob=("rho_phi", rho, phi))
        point, threshold = evaluate_system(system, cfg, geom, seed, opts,
                                           threshold=threshold, stream_index=i)
        points.append(point)
    return points


def uncertainty_calibration(models_by_omega, cfg: ScenarioConfig,
                            geom: ArrayGeometry, n_trials: int = 300_000,
                            seed: int = 0, opts: EvalOptions | None = None) -> list:
    """(omega, mean sigma_hat, RMSE) over detected-target trials, per model."""
    opts = opts or EvalOptions(n_trials=n_trials)
    out = []
    for i, (omega, model) in enumerate(models_by_omega):
        system = AeSystem(model, knob=("omega_r", omega, None))
        point, _ = evaluate_system(system, cfg, geom, seed, opts, stream_index=i)
        out.append((omega, point.mean_sigma_hat, point.rmse_rad))
    return out


def impairment_experiment(sigma_lambda: float, seed: int, cfg: ScenarioConfig,
                          plan: TrainingPlan, omega_list=None, rho_phi_grid=None,
                          wavelength: float = 1.0,
                          opts: EvalOptions = EvalOptions()):
    """Frozen perturbed-array experiment.

    One gap realization is drawn and held fixed.  The benchmark keeps
    designing (beams, detector grid, receive CSI) against the nominal array
    while its signals propagate through the perturbed one; the autoencoder
    trains directly on channels simulated with the perturbed array.  Returns
    (baseline points, autoencoder points).
    """
    impaired = perturb_geometry(Rng(seed).derive("geometry"), sigma_lambda,
                                cfg.num_antennas, wavelength)
    nominal = ArrayGeometry.nominal(cfg.num_antennas, wavelength)
    baseline_points = sweep_baseline(rho_phi_grid, cfg, impaired, seed=seed,
                                     design_geom=nominal, opts=opts)
    ae_points = []
    if omega_list is None:
        omega_list = [plan.omega_r]
    for i, omega in enumerate(omega_list):
        _, point, _ = train_and_evaluate_ae(omega, plan, cfg, impaired, i, opts)
        ae_points.append(point)
    return baseline_points, ae_points


# ----------------------------------------------------------------------- CSV

def _fmt(value) -> str:
    if value is None:
        return ""
    return f"{value:.10g}"


def write_results_csv(path, points) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(RESULTS_HEADER)
        for p in points:
            kind, k1, k2 = p.knob
            writer.writerow([
                kind, _fmt(k1), _fmt(k2), _fmt(p.ser), _fmt(p.pd), _fmt(p.pfa_emp),
                _fmt(p.rmse_rad), _fmt(p.mean_sigma_hat), p.n_trials, p.seed,
            ])


def write_beampattern_csv(path, geom: ArrayGeometry, beam: np.ndarray,
                          n_angles: int = 181) -> None:
    angles_deg = np.linspace(-90.0, 90.0, n_angles)
    energy = beampattern(geom, beam, np.deg2rad(angles_deg))
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(("angle_deg", "e_db"))
        for deg, e in zip(angles_deg, energy):
            writer.writerow([f"{deg:.10g}", f"{10.0 * np.log10(max(e, 1e-30)):.10g}"])
