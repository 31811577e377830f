"""Three-stage end-to-end training of the autoencoder against simulated channels.

Stage 1 trains {encoder, beamformer, comm-rx, angle} with a prior-weighted MSE
surrogate for the angle error, stage 2 freezes the angle head and trains the
uncertainty head through the Gaussian NLL, stage 3 freezes both and trains the
presence head through the detection BCE.  The communication cross-entropy is
active in every stage, weighted by (1 - omega_r).  Every batch is a fresh
i.i.d. draw; no data is reused.

The channel maps inside the training graph reuse the closed forms of
isacsim.channels: for a fixed scene draw both are affine in the transmitted
signal, so the tape propagates exact pathwise gradients into the transmitter.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from isacsim import autodiff as ad
from isacsim import networks as nn
from isacsim.arrays import ArrayGeometry, steering_matrix
from isacsim.channels import ScenarioConfig, SceneSample, draw_scene
from isacsim.losses import loss_cce, loss_isac, loss_td, loss_tr
from isacsim.model import (
    IsacModel,
    beam_parts,
    build_model,
    comm_rx_parts,
    constellation_parts,
)
from isacsim.rng import Rng

TRAINING_LOG_HEADER = ("stage", "batch_index", "loss_cce", "loss_radar_term", "loss_total")


class TrainingDiverged(RuntimeError):
    """Raised when a batch loss stops being finite."""


@dataclass(frozen=True)
class TrainingPlan:
    """Hyper-parameters for one training run."""

    omega_r: float = 0.09
    batch_size: int = 10_000
    learning_rate: float = 0.01
    total_samples: int = 2_000_000
    stage_fractions: tuple = (1 / 3, 1 / 3, 1 / 3)
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.omega_r <= 1.0:
            raise ValueError("omega_r must lie in [0, 1]")
        if self.batch_size < 1 or self.total_samples < self.batch_size:
            raise ValueError("need total_samples >= batch_size >= 1")
        if len(self.stage_fractions) != 3 or any(f < 0 for f in self.stage_fractions):
            raise ValueError("stage_fractions must be three nonnegative values")
        if abs(sum(self.stage_fractions) - 1.0) > 1e-9:
            raise ValueError("stage_fractions must sum to 1")


def stage_batch_counts(plan: TrainingPlan) -> tuple:
    """Split the batch budget by stage_fractions (largest remainder, ties early)."""
    total = plan.total_samples // plan.batch_size
    raw = [f * total for f in plan.stage_fractions]
    base = [int(np.floor(r)) for r in raw]
    order = sorted(range(3), key=lambda i: (-(raw[i] - base[i]), i))
    for i in order[: total - sum(base)]:
        base[i] += 1
    return tuple(base)


def _scalar(x) -> float:
    return float(x.data) if isinstance(x, ad.Tensor) else float(x)


def _cmul(ar, ai, br, bi):
    """(ar + j ai) * (br + j bi) on Tensors/arrays of matching shape."""
    re = ad.sub(ad.mul(ar, br), ad.mul(ai, bi))
    im = ad.add(ad.mul(ar, bi), ad.mul(ai, br))
    return re, im


def _cmatvec(a: np.ndarray, vr, vi):
    """Rows of constant complex matrix a dotted with the complex vector (vr, vi)."""
    re = ad.sub(ad.matmul(a.real, vr), ad.matmul(a.imag, vi))
    im = ad.add(ad.matmul(a.real, vi), ad.matmul(a.imag, vr))
    return re, im


def stage_losses(
    model: IsacModel,
    cfg: ScenarioConfig,
    geom: ArrayGeometry,
    sample: SceneSample,
    stage: int,
    omega_r: float,
):
    """Per-batch (loss_cce, radar term, total) for the given stage.

    Builds the full transmitter -> channel -> receiver graph; only the heads
    the stage's losses touch are evaluated.
    """
    n = len(sample)
    present = sample.target_present
    pm = present.astype(np.float64)

    xr_all, xi_all = constellation_parts(model)
    xr = ad.take_rows(xr_all, sample.message)
    xi = ad.take_rows(xi_all, sample.message)
    vr, vi = beam_parts(model)

    # radar link: z_r = t * alpha * (a(theta)^T v x) a(theta) + noise
    a_t = steering_matrix(geom, sample.target_angle)          # constants, (n, K)
    gr, gi = _cmatvec(a_t, vr, vi)
    gxr, gxi = _cmul(gr, gi, xr, xi)
    echo_gain = present * sample.radar_gain                   # t * alpha, constant
    er, ei = _cmul(gxr, gxi, echo_gain.real, echo_gain.imag)
    er, ei = ad.reshape(er, (n, 1)), ad.reshape(ei, (n, 1))
    zr_re = ad.add(ad.sub(ad.mul(er, a_t.real), ad.mul(ei, a_t.imag)), sample.radar_noise.real)
    zr_im = ad.add(ad.add(ad.mul(er, a_t.imag), ad.mul(ei, a_t.real)), sample.radar_noise.imag)
    radar_in = ad.concat([zr_re, zr_im], axis=1)

    # communication link: z_c = kappa * x + noise, kappa = beta * a(phi)^T v
    a_u = steering_matrix(geom, sample.rx_angle)
    hr, hi = _cmatvec(a_u, vr, vi)
    kr, ki = _cmul(hr, hi, sample.comm_gain.real, sample.comm_gain.imag)
    zc_re, zc_im = _cmul(kr, ki, xr, xi)
    zc_re = ad.add(zc_re, sample.comm_noise.real)
    zc_im = ad.add(zc_im, sample.comm_noise.imag)

    probs = comm_rx_parts(model, zc_re, zc_im, kr, ki)
    j_ce = loss_cce(probs, sample.message)

    if stage == 1:
        theta_hat = ad.reshape(nn.forward(model.angle, radar_in), (n,))
        err = ad.sub(theta_hat, sample.target_angle)
        sq = ad.tsum(ad.mul(ad.mul(err, err), pm))
        mse_cond = ad.div(sq, max(float(pm.sum()), 1.0))
        radar_term = ad.mul(cfg.target_prior, mse_cond)
    elif stage == 2:
        theta_hat = ad.reshape(nn.forward(model.angle, radar_in), (n,))
        sigma_hat = ad.reshape(nn.forward(model.uncertainty, radar_in), (n,))
        radar_term = ad.mul(
            cfg.target_prior, loss_tr(theta_hat, sigma_hat, sample.target_angle, present)
        )
    elif stage == 3:
        q = ad.reshape(nn.forward(model.presence, radar_in), (n,))
        radar_term = loss_td(q, present)
    else:
        raise ValueError(f"unknown stage {stage}")

    return j_ce, radar_term, loss_isac(radar_term, j_ce, omega_r)


# stage number -> nets receiving Adam updates (the rest stay frozen)
STAGE_TRAINED = {
    1: ("encoder", "beamformer", "comm_rx", "angle"),
    2: ("encoder", "beamformer", "comm_rx", "uncertainty"),
    3: ("encoder", "beamformer", "comm_rx", "presence"),
}


def train(plan: TrainingPlan, cfg: ScenarioConfig, geom: ArrayGeometry):
    """Run all three stages; returns the trained model and the per-batch log rows."""
    if geom.num_elements != cfg.num_antennas:
        raise ValueError("geometry and scenario disagree on the antenna count")
    counts = stage_batch_counts(plan)
    if sum(counts) == 0:
        raise ValueError("budget too small for a single batch")

    root = Rng(plan.seed)
    model = build_model(root, cfg)
    all_params = nn.lift_parameters(model.nets())
    rows = []

    for stage, n_batches in zip((1, 2, 3), counts):
        data_rng = root.derive("train-stage", stage)
        params = []
        for name in STAGE_TRAINED[stage]:
            params.extend(nn.parameters(getattr(model, name)))
        state = nn.adam_init(params, plan.learning_rate)
        for b in range(n_batches):
            sample = draw_scene(data_rng, cfg, plan.batch_size)
            j_ce, radar_term, total = stage_losses(model, cfg, geom, sample, stage, plan.omega_r)
            total_value = _scalar(total)
            if not np.isfinite(total_value):
                raise TrainingDiverged(
                    f"non-finite loss {total_value} at stage {stage} batch {b}"
                )
            if isinstance(total, ad.Tensor):
                total.backward()
            nn.adam_step(state, [p.data for p in params], [p.grad for p in params])
            for p in all_params:
                p.grad = None
            rows.append((stage, b, _scalar(j_ce), _scalar(radar_term), total_value))

    nn.detach_parameters(model.nets())
    return model, rows


def write_training_log(path, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRAINING_LOG_HEADER)
        for stage, b, j_ce, j_radar, total in rows:
            writer.writerow([stage, b, f"{j_ce:.10g}", f"{j_radar:.10g}", f"{total:.10g}"])
