"""TDMA reconfiguration timeline: SNR during switches and effective rate.

The cycle serves users 1..K in order, so the switch into user k starts from
user k-1's settled configuration (cyclically).  During a switch the serving
beamformer is the incoming user's, and T_c is measured from the switch
instant to the first sample whose SNR meets that user's threshold.  The
effective rate discounts the slot by the fraction lost to reconfiguration:

    R = max(T_s - T_c, 0) / T_s * log2(1 + snr_thr).
"""

from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleDesignError
from .lc_dynamics import plan_switch, switched_phase_at
from .phase_optimizer import (anomalous_reflection_plan, run_algorithm1,
                              weights_from_taus)
from .precoder import snr_direct


@dataclass(frozen=True)
class SwitchTrace:
    """Sampled timeline of one reconfiguration toward ``target_user``."""

    time_grid: np.ndarray      # (T,) s, uniform step
    phase_samples: np.ndarray  # (T, N) rad
    snr_samples: np.ndarray    # (T,) linear
    target_user: int
    t_c: float                 # first grid time with SNR >= threshold, or None


@dataclass(frozen=True)
class RateSweepResult:
    """Seed- and user-averaged effective-rate curves over a T_s grid."""

    ts_values: np.ndarray          # (S,) s
    rate_proposed: np.ndarray      # (S,) bits/s/Hz
    rate_benchmark: np.ndarray     # (S,) bits/s/Hz
    crossing_proposed: np.ndarray  # (n_seeds_used, K) s, inf = never crossed
    crossing_benchmark: np.ndarray
    seeds_used: tuple              # seeds where both designs were feasible
    n_seeds_total: int


def simulate_switch(w_from, w_to, lc, channels, user_k, q, noise_power,
                    gamma_thr, dt=1e-4, horizon=0.06):
    """Sample one switch on a uniform grid and record the threshold crossing."""
    if not dt > 0.0:
        raise ValueError("dt must be positive")
    if not horizon >= dt:
        raise ValueError("horizon must cover at least one step")
    if not gamma_thr >= 0.0:
        raise ValueError("threshold must be nonnegative")
    schedule = plan_switch(lc, w_from, w_to)
    t = np.arange(0.0, horizon + 0.5 * dt, dt)
    w = switched_phase_at(schedule, lc, t)
    snr = snr_direct(channels, user_k, w, q, noise_power)
    hit = np.nonzero(snr >= gamma_thr)[0]
    t_c = float(t[hit[0]]) if hit.size else None
    return SwitchTrace(time_grid=t, phase_samples=w, snr_samples=snr,
                       target_user=user_k, t_c=t_c)


def effective_rate(t_c, t_s, snr_thr):
    """max(T_s - T_c, 0)/T_s * log2(1 + snr_thr); t_c may be +inf."""
    if not t_s > 0.0:
        raise ValueError("slot length must be positive")
    if not t_c >= 0.0:
        raise ValueError("crossing time must be nonnegative")
    return max(t_s - t_c, 0.0) / t_s * np.log2(1.0 + snr_thr)


def cycle_crossing_times(plan, channels, lc, noise_power, thresholds,
                         dt=1e-4, horizon=0.06):
    """t_c of every cyclic transition (into user 0 from the last user, ...)."""
    k_users = plan.phases.shape[0]
    out = np.empty(k_users)
    for k in range(k_users):
        trace = simulate_switch(plan.phases[k - 1], plan.phases[k], lc,
                                channels, k, plan.beamformer, noise_power,
                                thresholds[k], dt=dt, horizon=horizon)
        out[k] = np.inf if trace.t_c is None else trace.t_c
    return out


def design_both_plans(config, channels):
    """(proposed, benchmark) plans for one channel draw, spec defaults."""
    lc = config.lc
    weights = weights_from_taus(lc.tau_plus, lc.tau_minus)
    thresholds = config.snr_thresholds_linear
    benchmark = anomalous_reflection_plan(channels, lc, weights,
                                          config.tx_power_w,
                                          config.noise_power_w, thresholds)
    proposed = run_algorithm1(channels, lc, weights, config.optimizer_params(),
                              config.tx_power_w, config.noise_power_w)
    return proposed, benchmark


def rate_sweep(config, build_channels, ts_grid_s=None, dt=None):
    """Effective-rate curves averaged over users and the config's seeds.

    ``build_channels(config, seed)`` supplies the channel draw so callers can
    reuse cached draws.  Seeds where either design is infeasible (including
    an infeasibility error from the solver) are excluded from the averages;
    they are reported via n_seeds_total vs seeds_used.
    """
    ts = np.asarray(config.ts_grid_s if ts_grid_s is None else ts_grid_s,
                    dtype=float)
    if ts.size == 0 or np.any(ts <= 0.0):
        raise ValueError("T_s grid must be nonempty and positive")
    step = config.sim.dt_s if dt is None else dt
    horizon = float(ts.max())
    thresholds = config.snr_thresholds_linear

    tc_p, tc_b, used = [], [], []
    for seed in config.seeds:
        channels = build_channels(config, seed)
        try:
            proposed, benchmark = design_both_plans(config, channels)
        except InfeasibleDesignError:
            continue
        if not (proposed.feasible and benchmark.feasible):
            continue
        tc_p.append(cycle_crossing_times(proposed, channels, config.lc,
                                         config.noise_power_w, thresholds,
                                         dt=step, horizon=horizon))
        tc_b.append(cycle_crossing_times(benchmark, channels, config.lc,
                                         config.noise_power_w, thresholds,
                                         dt=step, horizon=horizon))
        used.append(seed)
    if not used:
        raise InfeasibleDesignError(
            "no seed produced a feasible pair of designs")
    tc_p = np.asarray(tc_p)   # (n_used, K)
    tc_b = np.asarray(tc_b)

    gammas = np.asarray(thresholds, dtype=float)
    rate_p = np.empty(ts.size)
    rate_b = np.empty(ts.size)
    for i, t_s in enumerate(ts):
        rp = [effective_rate(tc, t_s, gammas[k])
              for row in tc_p for k, tc in enumerate(row)]
        rb = [effective_rate(tc, t_s, gammas[k])
              for row in tc_b for k, tc in enumerate(row)]
        rate_p[i] = np.mean(rp)
        rate_b[i] = np.mean(rb)
    return RateSweepResult(ts_values=ts, rate_proposed=rate_p,
                           rate_benchmark=rate_b, crossing_proposed=tc_p,
                           crossing_benchmark=tc_b, seeds_used=tuple(used),
                           n_seeds_total=len(config.seeds))
