"""Scene generation and the radar/communication channels.

Each Monte-Carlo scene draws a message, a Bernoulli target-presence flag, a
target angle, a user angle, Rayleigh-fading complex gains for both links and
the additive receiver noise.  Given a transmit vector y the two channels are

    radar: z_r = t * alpha * a_rx(theta) * (a_tx(theta)^T y) + n,   n ~ CN(0, N0 I_K)
    comm:  z_c = beta * a_tx(phi)^T y + n_c,                        n_c ~ CN(0, N0)

Both maps are affine in y for a fixed scene draw, so gradients pass through
the simulated channel unchanged during training.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from isacsim.arrays import ArrayGeometry, sample_cn, steering_matrix
from isacsim.rng import Rng


@dataclass(frozen=True)
class ScenarioConfig:
    """Static description of one simulated deployment.

    Angles are radians; gain variances are linear (snr_* = variance / noise_psd).
    target_angle_range bounds the radar sector, rx_angle_range the user sector.
    """

    num_antennas: int = 16
    modulation_size: int = 4
    energy_budget: float = 1.0
    noise_psd: float = 1.0
    radar_gain_var: float = 1.0
    comm_gain_var: float = 100.0
    target_angle_range: tuple = (np.deg2rad(-20.0), np.deg2rad(20.0))
    rx_angle_range: tuple = (np.deg2rad(30.0), np.deg2rad(50.0))
    target_prior: float = 0.5

    def __post_init__(self):
        if self.num_antennas < 1:
            raise ValueError("num_antennas must be >= 1")
        if self.modulation_size < 2:
            raise ValueError("modulation_size must be >= 2")
        for name in ("energy_budget", "noise_psd"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive")
        for name in ("radar_gain_var", "comm_gain_var"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be nonnegative")
        for name in ("target_angle_range", "rx_angle_range"):
            lo, hi = getattr(self, name)
            if not -np.pi / 2 <= lo < hi <= np.pi / 2:
                raise ValueError(f"{name} must satisfy -pi/2 <= lo < hi <= pi/2")
        if not 0.0 <= self.target_prior <= 1.0:
            raise ValueError("target_prior must lie in [0, 1]")

    @classmethod
    def from_snr(cls, snr_r_db: float, snr_c_db: float, **kwargs) -> "ScenarioConfig":
        """Build a config from SNRs in dB instead of linear gain variances."""
        noise_psd = kwargs.pop("noise_psd", 1.0)
        return cls(
            noise_psd=noise_psd,
            radar_gain_var=noise_psd * 10.0 ** (snr_r_db / 10.0),
            comm_gain_var=noise_psd * 10.0 ** (snr_c_db / 10.0),
            **kwargs,
        )


@dataclass(frozen=True)
class SceneSample:
    """A batch of i.i.d. scene draws; every field has leading dimension n."""

    message: np.ndarray        # (n,) int in [0, |M|)
    target_present: np.ndarray  # (n,) bool
    target_angle: np.ndarray   # (n,) rad
    rx_angle: np.ndarray       # (n,) rad
    radar_gain: np.ndarray     # (n,) complex
    comm_gain: np.ndarray      # (n,) complex
    radar_noise: np.ndarray    # (n, K) complex
    comm_noise: np.ndarray     # (n,) complex

    def __len__(self) -> int:
        return self.message.shape[0]


@dataclass(frozen=True)
class RadarObservation:
    z: np.ndarray  # (n, K) complex


@dataclass(frozen=True)
class CommObservation:
    z: np.ndarray    # (n,) complex
    csi: np.ndarray  # (n,) complex, kappa = beta * a_tx(phi)^T v known at the user


def draw_scene(rng: Rng, cfg: ScenarioConfig, n: int = 1) -> SceneSample:
    """Draw n i.i.d. scenes: messages, presence flags, angles, gains and noise."""
    message = rng.integers(0, cfg.modulation_size, size=n)
    target_present = rng.uniform(size=n) < cfg.target_prior
    target_angle = rng.uniform(*cfg.target_angle_range, size=n)
    rx_angle = rng.uniform(*cfg.rx_angle_range, size=n)
    radar_gain = sample_cn(rng, cfg.radar_gain_var, n)
    comm_gain = sample_cn(rng, cfg.comm_gain_var, n)
    radar_noise = sample_cn(rng, cfg.noise_psd, (n, cfg.num_antennas))
    comm_noise = sample_cn(rng, cfg.noise_psd, n)
    return SceneSample(
        message=message,
        target_present=target_present,
        target_angle=target_angle,
        rx_angle=rx_angle,
        radar_gain=radar_gain,
        comm_gain=comm_gain,
        radar_noise=radar_noise,
        comm_noise=comm_noise,
    )


def radar_forward(geom: ArrayGeometry, sample: SceneSample, y: np.ndarray) -> RadarObservation:
    """Monostatic radar observation for transmit vector(s) y.

    y is either one (K,) vector shared by the batch or an (n, K) batch of
    per-scene vectors (the transmitted symbol scales the beam per scene).
    Absent targets contribute noise only.
    """
    a = steering_matrix(geom, sample.target_angle)          # (n, K)
    y = np.asarray(y)
    gain_tx = a @ y if y.ndim == 1 else np.einsum("nk,nk->n", a, y)
    echo = sample.target_present * sample.radar_gain * gain_tx
    return RadarObservation(z=echo[:, None] * a + sample.radar_noise)


def comm_forward(
    geom: ArrayGeometry, sample: SceneSample, v: np.ndarray, x: np.ndarray
) -> CommObservation:
    """Single-antenna user observation plus the receiver-side CSI.

    The user at rx_angle sees z = kappa * x + noise with
    kappa = beta * a_tx(rx_angle)^T v.  kappa is returned alongside z because
    the receiver is assumed to know it (pilot-estimated), but never x itself.
    v is one (K,) beam shared by the batch or an (n, K) batch.
    """
    a = steering_matrix(geom, sample.rx_angle)              # (n, K)
    v = np.asarray(v)
    gain_tx = a @ v if v.ndim == 1 else np.einsum("nk,nk->n", a, v)
    csi = sample.comm_gain * gain_tx
    return CommObservation(z=csi * x + sample.comm_noise, csi=csi)
