"""The six-network autoencoder: transmitter, beamformer and the three receivers.

Complex quantities cross network boundaries as concatenated (real, imaginary)
parts.  Every function here runs in two modes: on plain float64 arrays for
fast evaluation, or on autodiff Tensors (after networks.lift_parameters)
during training, where the identical code extends the tape.

Transmit-side normalization enforces the power constraint as two separate
unit-energy conditions: the learned constellation is rescaled to unit average
energy and the beam to ||v||^2 = E_tx, so E_m ||v x(m)||^2 = E_tx while the
per-symbol amplitudes remain free to carry information.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from isacsim import autodiff as ad
from isacsim import networks as nn
from isacsim.channels import ScenarioConfig
from isacsim.rng import Rng

# fixed network order used by build_model and the checkpoint layout
NET_ORDER = ("encoder", "beamformer", "presence", "angle", "uncertainty", "comm_rx")
OUTPUT_ACTIVATIONS = ("linear", "linear", "sigmoid", "scaled-tanh", "relu-floor", "softmax")


@dataclass
class IsacModel:
    """Trained/trainable parameter bundle plus the static scene priors it assumes."""

    encoder: nn.Mlp      # onehot(m) -> (Re x, Im x), pre-normalization
    beamformer: nn.Mlp   # angular prior -> (Re v | Im v), pre-normalization
    presence: nn.Mlp     # (Re z_r | Im z_r) -> q
    angle: nn.Mlp        # (Re z_r | Im z_r) -> theta_hat, scaled tanh
    uncertainty: nn.Mlp  # (Re z_r | Im z_r) -> sigma_hat, relu + floor
    comm_rx: nn.Mlp      # (Re z_c, Im z_c, Re kappa, Im kappa) -> message probabilities
    angle_prior: tuple   # (theta_min, theta_max, rx_min, rx_max) rad
    energy_budget: float = 1.0

    @property
    def num_antennas(self) -> int:
        return self.presence.layer_dims[0] // 2

    @property
    def modulation_size(self) -> int:
        return self.encoder.layer_dims[0]

    def nets(self) -> tuple:
        return tuple(getattr(self, name) for name in NET_ORDER)


def layer_dims(num_antennas: int, modulation_size: int) -> dict:
    """Widths from the reference architecture, parametric in K."""
    k, m = num_antennas, modulation_size
    return {
        "encoder": (m, k, k, 2 * k, 2),
        "beamformer": (4, k, k, 2 * k, 2 * k),
        "presence": (2 * k, 2 * k, 2 * k, k, 1),
        "angle": (2 * k, 2 * k, 2 * k, k, 1),
        "uncertainty": (2 * k, 2 * k, 2 * k, k, 1),
        "comm_rx": (4, k, 2 * k, 2 * k, m),
    }


def build_model(rng: Rng, cfg: ScenarioConfig) -> IsacModel:
    dims = layer_dims(cfg.num_antennas, cfg.modulation_size)
    nets = {
        name: nn.init(rng.derive("init", i), dims[name], act)
        for i, (name, act) in enumerate(zip(NET_ORDER, OUTPUT_ACTIVATIONS))
    }
    prior = (*cfg.target_angle_range, *cfg.rx_angle_range)
    return IsacModel(angle_prior=prior, energy_budget=cfg.energy_budget, **nets)


# ------------------------------------------------------------------ transmit

def constellation_parts(model: IsacModel):
    """Learned constellation as (re, im) vectors of length |M|, unit average energy."""
    m_size = model.modulation_size
    out = nn.forward(model.encoder, np.eye(m_size))           # (|M|, 2)
    raw_re = ad.matmul(out, np.array([1.0, 0.0]))
    raw_im = ad.matmul(out, np.array([0.0, 1.0]))
    energy = ad.tmean(ad.add(ad.mul(raw_re, raw_re), ad.mul(raw_im, raw_im)))
    scale = ad.sqrt(energy)
    return ad.div(raw_re, scale), ad.div(raw_im, scale)


def beam_parts(model: IsacModel):
    """Learned beam as (re, im) vectors of length K with ||v||^2 = E_tx."""
    k = model.num_antennas
    prior = np.asarray(model.angle_prior) / (np.pi / 2.0)     # constant input in [-1,1]^4
    out = nn.forward(model.beamformer, prior[None, :])        # (1, 2K)
    raw_re = ad.reshape(ad.slice_cols(out, 0, k), (k,))
    raw_im = ad.reshape(ad.slice_cols(out, k, 2 * k), (k,))
    norm = ad.sqrt(ad.tsum(ad.add(ad.mul(raw_re, raw_re), ad.mul(raw_im, raw_im))))
    scale = ad.div(np.sqrt(model.energy_budget), norm)
    return ad.mul(raw_re, scale), ad.mul(raw_im, scale)


def transmit(model: IsacModel, m: np.ndarray):
    """Map messages to (x, v, y) with y = v * x(m); evaluation path, complex dtype."""
    xr, xi = constellation_parts(model)
    vr, vi = beam_parts(model)
    x = (np.asarray(xr) + 1j * np.asarray(xi))[np.asarray(m)]
    v = np.asarray(vr) + 1j * np.asarray(vi)
    return x, v, np.outer(x, v)


# ----------------------------------------------------------------- receivers

def radar_rx_parts(model: IsacModel, zr_re, zr_im):
    """Radar receiver heads on a (n, K) observation given as (re, im) parts.

    Returns (q, theta_hat, sigma_hat), each of shape (n,).
    """
    n = zr_re.shape[0]
    inp = ad.concat([zr_re, zr_im], axis=1)
    q = ad.reshape(nn.forward(model.presence, inp), (n,))
    theta = ad.reshape(nn.forward(model.angle, inp), (n,))
    sigma = ad.reshape(nn.forward(model.uncertainty, inp), (n,))
    return q, theta, sigma


def comm_rx_parts(model: IsacModel, zc_re, zc_im, k_re, k_im):
    """Message posterior (n, |M|) from the scalar observation and its CSI."""
    cols = [ad.reshape(p, (p.shape[0], 1)) for p in (zc_re, zc_im, k_re, k_im)]
    return nn.forward(model.comm_rx, ad.concat(cols, axis=1))


def radar_receive(model: IsacModel, z: np.ndarray):
    """Evaluation-path radar receiver on complex (n, K) observations."""
    return radar_rx_parts(model, np.ascontiguousarray(z.real), np.ascontiguousarray(z.imag))


def comm_receive(model: IsacModel, z: np.ndarray, kappa: np.ndarray) -> np.ndarray:
    """Evaluation-path message posterior from complex z and CSI kappa."""
    return comm_rx_parts(model, z.real, z.imag, kappa.real, kappa.imag)


# ---------------------------------------------------------------- persistence

def save_model(path, model: IsacModel) -> None:
    nn.write_checkpoint(path, model.nets())


def load_model(path, cfg: ScenarioConfig) -> IsacModel:
    """Read a checkpoint and check its shapes against the scenario."""
    nets = nn.read_checkpoint(path, OUTPUT_ACTIVATIONS)
    expect = layer_dims(cfg.num_antennas, cfg.modulation_size)
    for name, net in zip(NET_ORDER, nets):
        if net.layer_dims != expect[name]:
            raise ValueError(
                f"checkpoint {name} dims {net.layer_dims} do not match "
                f"scenario dims {expect[name]}"
            )
    prior = (*cfg.target_angle_range, *cfg.rx_angle_range)
    return IsacModel(
        angle_prior=prior, energy_budget=cfg.energy_budget, **dict(zip(NET_ORDER, nets))
    )
