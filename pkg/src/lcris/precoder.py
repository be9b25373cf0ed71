"""Transmit beamforming and the rank-one SNR form of the RIS link.

With the direct path blocked and a pure-LOS BS-RIS link, the SNR seen by a
user is a quadratic form in the element phasors s = exp(j*omega):

    SNR(omega) = kappa * |m^T s|^2,
    m = diag(h_ris_user^H) a_ris(arrival from BS),
    kappa = |chi|^2 * ||q||^2 * ||a_bs||^2 / sigma^2,

where chi is the LOS amplitude of the BS-RIS matrix.  kappa carries
``||a_bs||^2`` because the LOS beamformer picks up one factor of ||a_bs||
from a_bs^H q and the squared magnitude doubles it.  The form is exact in
that regime (checked against the direct path to 1e-10); on Rician channels it
is the estimated surrogate the optimizer works with, chi being the projection
of the BS-RIS matrix onto the steering outer product.
"""

from dataclasses import dataclass

import numpy as np

from .errors import RegimeError
from .geometry_channel import steering_vector

# relative Frobenius residual allowed when claiming the pure-LOS regime
_LOS_RESIDUAL_TOL = 1e-9


@dataclass(frozen=True)
class Beamformer:
    weights: np.ndarray   # (N_t,) complex
    power_budget: float   # watts

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=complex)
        if w.ndim != 1 or w.size == 0:
            raise ValueError("weights must be a nonempty vector")
        if np.vdot(w, w).real > self.power_budget * (1.0 + 1e-12):
            raise ValueError("beamformer exceeds its power budget")
        object.__setattr__(self, "weights", w)

    @property
    def power(self):
        return float(np.vdot(self.weights, self.weights).real)


@dataclass(frozen=True)
class SnrQuadratic:
    """Rank-one SNR model SNR(omega) = scale * |m^T exp(j*omega)|^2."""

    m: np.ndarray   # (N,) complex
    scale: float    # kappa, 1/W times beamformer power already folded in
    user_k: int

    def snr(self, phases):
        s = np.exp(1j * np.asarray(phases, dtype=float))
        return float(self.scale * np.abs(s @ self.m) ** 2)

    def z(self, phases):
        """z = M s for the implicit M = scale * conj(m) m^T (never formed)."""
        s = np.exp(1j * np.asarray(phases, dtype=float))
        return self.scale * self.m.conj() * (self.m @ s)

    def max_snr(self):
        """Co-phased upper bound kappa * (sum |m_n|)^2."""
        return float(self.scale * np.sum(np.abs(self.m)) ** 2)


def matched_filter(h_eff, p_t):
    """Full-power matched filter sqrt(P) h / ||h|| for an effective channel."""
    h = np.asarray(h_eff, dtype=complex)
    norm = np.linalg.norm(h)
    if norm == 0.0:
        raise ValueError("zero effective channel has no matched filter")
    if not p_t > 0.0:
        raise ValueError("transmit power must be positive")
    return Beamformer(np.sqrt(p_t) * h / norm, p_t)


def los_beamformer(bs_array, bs_aod, p_t):
    """Beamformer aimed at the LOS departure toward the RIS.

    Independent of the RIS phase configuration, so it can be computed once
    per scenario instead of per candidate phase vector.
    """
    return matched_filter(steering_vector(bs_array, bs_aod), p_t)


def snr_direct(channels, user_k, phases, q, noise_power):
    """SNR through the full link h_d^H q + h_r^H diag(e^{j omega}) H_t q.

    ``phases`` may be one (N,) vector or a (T, N) stack of vectors, in which
    case a (T,) SNR array is returned.
    """
    if not 0 <= user_k < channels.n_users:
        raise ValueError("user index out of range")
    if not noise_power > 0.0:
        raise ValueError("noise power must be positive")
    w = np.asarray(phases, dtype=float)
    if w.shape[-1] != channels.ris_array.size:
        raise ValueError("phase vector length != RIS size")
    qv = q.weights if isinstance(q, Beamformer) else np.asarray(q, dtype=complex)
    if qv.shape != (channels.bs_array.size,):
        raise ValueError("beamformer length != BS size")
    u = channels.h_ris_user[user_k].conj() * (channels.H_bs_ris @ qv)
    amp = channels.h_direct[user_k].conj() @ qv + np.exp(1j * w) @ u
    out = np.abs(amp) ** 2 / noise_power
    return float(out) if w.ndim == 1 else out


def composite_quadratic(channels, user_k, q, noise_power):
    """Rank-one SNR model built from the exact per-element composite channel.

    m_n = conj(h_r,n) (H_t q)_n reproduces snr_direct exactly whenever the
    direct BS-user path is blocked, Rician or not, and coincides with the
    LOS-factorized model of snr_quadratic_form in the pure-LOS regime.  The
    design loop gates on this form so its feasibility decisions cannot drift
    from the direct-path re-verification.
    """
    if not 0 <= user_k < channels.n_users:
        raise ValueError("user index out of range")
    if not noise_power > 0.0:
        raise ValueError("noise power must be positive")
    qv = q.weights if isinstance(q, Beamformer) else np.asarray(q, dtype=complex)
    if qv.shape != (channels.bs_array.size,):
        raise ValueError("beamformer length != BS size")
    m = channels.h_ris_user[user_k].conj() * (channels.H_bs_ris @ qv)
    return SnrQuadratic(m=m, scale=1.0 / noise_power, user_k=user_k)


def snr_quadratic_form(channels, user_k, q_los, noise_power, require_los_regime=True):
    """Rank-one (m, kappa) such that SNR(omega) = kappa |m^T e^{j omega}|^2.

    Exact when the BS-RIS matrix is pure LOS, the direct path is blocked, and
    q_los is the LOS beamformer; ``require_los_regime=True`` (the default)
    verifies those three facts and raises RegimeError otherwise.  With
    ``require_los_regime=False`` the same construction acts as the estimated
    model on Rician channels.
    """
    if not 0 <= user_k < channels.n_users:
        raise ValueError("user index out of range")
    if not noise_power > 0.0:
        raise ValueError("noise power must be positive")
    qv = q_los.weights if isinstance(q_los, Beamformer) else np.asarray(q_los, dtype=complex)
    a_bs = steering_vector(channels.bs_array, channels.bs_aod)
    a_ris = steering_vector(channels.ris_array, channels.ris_aoa)
    h_t = channels.H_bs_ris
    chi = (a_ris.conj() @ h_t @ a_bs) / (a_ris.size * a_bs.size)

    if require_los_regime:
        resid = np.linalg.norm(h_t - chi * np.outer(a_ris, a_bs.conj()))
        if resid > _LOS_RESIDUAL_TOL * np.linalg.norm(h_t):
            raise RegimeError("BS-RIS matrix is not pure LOS")
        h_d = channels.h_direct[user_k]
        if np.linalg.norm(h_d) > 1e-12 * np.linalg.norm(channels.h_ris_user[user_k]):
            raise RegimeError("direct path is not blocked")
        cross = np.abs(np.vdot(a_bs, qv))
        if cross < (1.0 - 1e-9) * np.linalg.norm(a_bs) * np.linalg.norm(qv):
            raise RegimeError("beamformer is not the LOS matched filter")

    p_q = float(np.vdot(qv, qv).real)
    kappa = np.abs(chi) ** 2 * p_q * a_bs.size / noise_power
    m = channels.h_ris_user[user_k].conj() * a_ris
    return SnrQuadratic(m=m, scale=float(kappa), user_k=user_k)
