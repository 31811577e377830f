"""Training losses: detection BCE, angle NLL, message cross-entropy, trade-off mix.

All losses are batch means and accept autodiff Tensors or plain arrays.
Probabilities are clamped to [1e-12, 1 - 1e-12] before any log so no loss can
return an infinity; loss_tr is therefore bounded below by log(sigma floor).
"""

from __future__ import annotations

import numpy as np

from isacsim import autodiff as ad

PROB_CLAMP = 1e-12


def loss_td(q, t):
    """Binary cross-entropy -E[t log q + (1-t) log(1-q)] over the whole batch."""
    t = np.asarray(t, dtype=np.float64)
    q = ad.clip(q, PROB_CLAMP, 1.0 - PROB_CLAMP)
    per = ad.add(ad.mul(t, ad.log(q)), ad.mul(1.0 - t, ad.log(ad.sub(1.0, q))))
    return ad.neg(ad.tmean(per))


def loss_tr(theta_hat, sigma_hat, theta, present):
    """Gaussian NLL E[log sigma + |theta - theta_hat|^2 / (2 sigma^2)].

    The mean runs over target-present batch members only (boolean mask
    `present`); an empty subset contributes 0.
    """
    present = np.asarray(present, dtype=np.float64)
    count = present.sum()
    if count == 0:
        return np.float64(0.0)
    err = ad.sub(theta_hat, np.asarray(theta, dtype=np.float64))
    sq = ad.mul(err, err)
    var2 = ad.mul(2.0, ad.mul(sigma_hat, sigma_hat))
    per = ad.add(ad.log(sigma_hat), ad.div(sq, var2))
    return ad.div(ad.tsum(ad.mul(per, present)), float(count))


def loss_cce(m_hat, m):
    """Categorical cross-entropy -E[log m_hat[m]] for probability rows m_hat."""
    m = np.asarray(m)
    onehot = np.zeros(getattr(m_hat, "shape", np.shape(m_hat)), dtype=np.float64)
    onehot[np.arange(m.shape[0]), m] = 1.0
    clamped = ad.clip(m_hat, PROB_CLAMP, 1.0 - PROB_CLAMP)
    picked = ad.tsum(ad.mul(onehot, ad.log(clamped)), axis=1)
    return ad.neg(ad.tmean(picked))


def loss_isac(radar_term, comm_term, omega_r: float):
    """Convex combination omega_r * J_radar + (1 - omega_r) * J_comm.

    The endpoints return the surviving term exactly, so a zero weight can
    never leak gradients (or a non-finite value) from the other objective.
    """
    if not 0.0 <= omega_r <= 1.0:
        raise ValueError("omega_r must lie in [0, 1]")
    if omega_r == 0.0:
        return comm_term
    if omega_r == 1.0:
        return radar_term
    return ad.add(ad.mul(omega_r, radar_term), ad.mul(1.0 - omega_r, comm_term))
