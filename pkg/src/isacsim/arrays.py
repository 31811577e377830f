"""Array geometry, steering vectors and beampatterns for a uniform linear array.

Element 0 sits at the origin and positions grow as cumulative sums of the
inter-element gaps, so a nominal half-wavelength array has positions
0, lambda/2, lambda, ...  Only the ratio position/wavelength enters any phase,
which keeps every quantity unit-consistent.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from isacsim.rng import Rng


@dataclass(frozen=True)
class ArrayGeometry:
    """Physical layout of the transmit/receive array.

    gaps holds the K-1 inter-element spacings in the same unit as wavelength;
    all must be strictly positive.
    """

    num_elements: int
    wavelength: float
    gaps: np.ndarray = field(repr=False)

    def __post_init__(self):
        gaps = np.asarray(self.gaps, dtype=np.float64)
        object.__setattr__(self, "gaps", gaps)
        if self.num_elements < 1:
            raise ValueError("need at least one element")
        if self.wavelength <= 0.0:
            raise ValueError("wavelength must be positive")
        if gaps.shape != (self.num_elements - 1,):
            raise ValueError(
                f"expected {self.num_elements - 1} gaps, got shape {gaps.shape}"
            )
        if np.any(gaps <= 0.0):
            raise ValueError("all inter-element gaps must be positive")

    @property
    def positions(self) -> np.ndarray:
        """Element positions with element 0 at the origin, shape (K,)."""
        return np.concatenate(([0.0], np.cumsum(self.gaps)))

    @classmethod
    def nominal(cls, num_elements: int, wavelength: float = 1.0) -> "ArrayGeometry":
        """Half-wavelength uniform array."""
        gaps = np.full(num_elements - 1, wavelength / 2.0)
        return cls(num_elements, wavelength, gaps)


def steering_vector(geom: ArrayGeometry, angle: float) -> np.ndarray:
    """Unit-modulus response a(theta), [a]_k = exp(-j 2 pi p_k sin(theta) / lambda).

    angle is measured from broadside in radians.  Element 0 is always 1+0j.
    """
    phase = -2.0 * np.pi * geom.positions * np.sin(angle) / geom.wavelength
    return np.exp(1j * phase)


def steering_matrix(geom: ArrayGeometry, angles: np.ndarray) -> np.ndarray:
    """Steering vectors for a batch of angles, shape (len(angles), K)."""
    angles = np.asarray(angles, dtype=np.float64)
    phase = -2.0 * np.pi * np.outer(np.sin(angles), geom.positions) / geom.wavelength
    return np.exp(1j * phase)


def beampattern(geom: ArrayGeometry, beam: np.ndarray, angles: np.ndarray) -> np.ndarray:
    """Radiated energy E(angle) = |a(angle)^T beam|^2 for each angle."""
    proj = steering_matrix(geom, np.atleast_1d(angles)) @ np.asarray(beam)
    out = np.abs(proj) ** 2
    return out if np.ndim(angles) else out[0]


def sample_cn(rng: Rng, variance: float, shape) -> np.ndarray:
    """Circularly-symmetric complex Gaussian draws with E|x|^2 = variance."""
    if variance < 0.0:
        raise ValueError("variance must be nonnegative")
    scale = np.sqrt(variance / 2.0)
    return scale * (rng.normal(size=shape) + 1j * rng.normal(size=shape))


def perturb_geometry(
    rng: Rng,
    sigma_lambda: float,
    num_elements: int,
    wavelength: float = 1.0,
) -> ArrayGeometry:
    """Array with i.i.d. Gaussian gap errors around the nominal half wavelength.

    Gaps are drawn from N(lambda/2, sigma_lambda^2); nonpositive draws are
    rejected and redrawn so the element order is preserved.
    """
    if sigma_lambda < 0.0:
        raise ValueError("sigma_lambda must be nonnegative")
    gaps = rng.normal(wavelength / 2.0, sigma_lambda, size=num_elements - 1)
    bad = gaps <= 0.0
    while np.any(bad):
        gaps[bad] = rng.normal(wavelength / 2.0, sigma_lambda, size=int(bad.sum()))
        bad = gaps <= 0.0
    return ArrayGeometry(num_elements, wavelength, gaps)
