"""Built-in oracle suites: independent recomputations of the core math.

Each suite re-derives a result through a different route (bisection instead
of closed forms, finite differences instead of analytic gradients, exhaustive
search instead of co-phasing) and reports the worst observed deviation, so a
regression anywhere in the chain surfaces as a failed suite rather than a
silently shifted number.
"""

import dataclasses
import time
from dataclasses import dataclass

import numpy as np

from .config import LinkSet, ScenarioConfig
from .geometry_channel import (ArraySpec, LinkParams, build_scenario_channels)
from .lc_dynamics import LcParams, plan_switch, transition_phase
from .phase_optimizer import lagrangian_gradient, weights_from_taus
from .precoder import SnrQuadratic, los_beamformer, snr_direct, snr_quadratic_form


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: bool
    worst: float      # worst observed deviation, suite-specific units
    tolerance: float
    n_checked: int
    runtime_s: float

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return (f"{status}  {self.name}: worst {self.worst:.3e} "
                f"(tol {self.tolerance:.0e}, n={self.n_checked}, "
                f"{self.runtime_s:.2f}s)")


def _los_instance(rng):
    links = LinkSet(
        bs_ris=LinkParams(k_factor=np.inf, pathloss_exponent=2.0),
        ris_ue=LinkParams(k_factor=np.inf, pathloss_exponent=2.0),
        bs_ue=LinkParams(k_factor=np.inf, pathloss_exponent=3.5),
    )
    ris = ArraySpec(n_y=int(rng.integers(1, 9)), n_z=int(rng.integers(1, 5)),
                    position=(0.0, 50.0, 5.0), orientation=(1.0, 0.0, 0.0))
    bs = ArraySpec(n_y=int(rng.integers(1, 5)), n_z=int(rng.integers(1, 5)),
                   position=(30.0, 0.0, 10.0),
                   orientation=(-30.0, 50.0, -5.0))
    users = tuple(
        (float(rng.uniform(-40.0, 40.0)), float(rng.uniform(-60.0, 60.0)))
        for _ in range(int(rng.integers(1, 3))))
    return dataclasses.replace(
        ScenarioConfig(), links=links, blockage=0.0, ris_array=ris,
        bs_array=bs, user_directions_deg=users,
        user_range_m=float(rng.uniform(3.0, 15.0)))


def check_quadratic_equivalence(n_instances=200, tol=1e-10, rng_seed=0):
    """Rank-one form vs the direct link equation on pure-LOS scenarios."""
    t0 = time.time()
    rng = np.random.default_rng(rng_seed)
    worst = 0.0
    for i in range(n_instances):
        cfg = _los_instance(rng)
        channels = build_scenario_channels(cfg, rng_seed=int(rng.integers(1 << 30)))
        q = los_beamformer(channels.bs_array, channels.bs_aod, cfg.tx_power_w)
        user_k = i % channels.n_users
        quad = snr_quadratic_form(channels, user_k, q, cfg.noise_power_w)
        w = rng.uniform(0.0, 2.0 * np.pi, channels.ris_array.size)
        direct = snr_direct(channels, user_k, w, q, cfg.noise_power_w)
        worst = max(worst, abs(quad.snr(w) - direct) / direct)
    return SuiteResult("quadratic-form equivalence", worst <= tol, worst, tol,
                       n_instances, time.time() - t0)


def check_transition_times(n_transitions=1000, tol=1e-9, rng_seed=0):
    """Closed-form release times vs bisection on the settling dynamics."""
    t0 = time.time()
    rng = np.random.default_rng(rng_seed)
    lc = LcParams()
    worst = 0.0
    lo, hi = lc.clamp_lo, lc.clamp_hi
    for _ in range(n_transitions):
        w0 = float(rng.uniform(lo, hi))
        wd = float(rng.uniform(lo, hi))
        if abs(w0 - wd) < 1e-9:
            continue
        sched = plan_switch(lc, np.array([w0]), np.array([wd]))
        forcing = float(sched.forcing_target[0])
        # bisection: forced dynamics run from w0 toward the rail; find the
        # crossing of the desired phase
        t_lo, t_hi = 0.0, 2.0
        rising = wd >= w0
        for _ in range(64):
            mid = 0.5 * (t_lo + t_hi)
            val = float(transition_phase(lc, mid, w0, forcing))
            if (val < wd) == rising:
                t_lo = mid
            else:
                t_hi = mid
        oracle = 0.5 * (t_lo + t_hi)
        worst = max(worst, abs(float(sched.release_time[0]) - oracle)
                    / max(oracle, 1e-12))
    return SuiteResult("transition-time closed forms", worst <= tol, worst,
                       tol, n_transitions, time.time() - t0)


def check_gradient(n_points=100, tol=1e-6, rng_seed=0):
    """Analytic Lagrangian gradient vs central finite differences."""
    t0 = time.time()
    rng = np.random.default_rng(rng_seed)
    weights = weights_from_taus(0.005, 0.024)
    worst = 0.0
    for _ in range(n_points):
        n = int(rng.integers(2, 9))
        m = rng.normal(size=n) + 1j * rng.normal(size=n)
        quad = SnrQuadratic(m=m, scale=float(rng.uniform(0.1, 3.0)), user_k=0)
        prev = rng.uniform(0.5, 5.5, n)
        w = prev + rng.uniform(1e-2, 0.4, n) * rng.choice([-1.0, 1.0], n)
        lam = float(rng.uniform(0.0, 2.0))

        def lagrangian(x):
            d = x - prev
            c = np.where(d >= 0.0, weights.c_plus, weights.c_minus)
            return float(np.sum(c * d ** 2) - lam * quad.snr(x))

        grad = lagrangian_gradient(w, prev, lam, quad, weights)
        fd = np.empty(n)
        eps = 1e-6
        for i in range(n):
            e = np.zeros(n)
            e[i] = eps
            fd[i] = (lagrangian(w + e) - lagrangian(w - e)) / (2.0 * eps)
        worst = max(worst, float(np.linalg.norm(grad - fd)
                                 / max(np.linalg.norm(fd), 1e-12)))
    return SuiteResult("lagrangian gradient", worst <= tol, worst, tol,
                       n_points, time.time() - t0)


def check_benchmark_optimality(levels=64, n_instances=10, tol=1e-9, rng_seed=0):
    """64-level exhaustive search never beats the co-phased benchmark."""
    from .phase_optimizer import anomalous_reflection_plan

    t0 = time.time()
    rng = np.random.default_rng(rng_seed)
    worst = 0.0   # most the exhaustive search ever won by, relative
    n_checked = 0
    for i in range(n_instances):
        n = (i % 3) + 1
        cfg = dataclasses.replace(
            ScenarioConfig(),
            ris_array=ArraySpec(n_y=1, n_z=n, position=(0.0, 50.0, 5.0),
                                orientation=(1.0, 0.0, 0.0)))
        channels = build_scenario_channels(cfg, rng_seed=int(rng.integers(1 << 30)))
        lc = cfg.lc
        weights = weights_from_taus(lc.tau_plus, lc.tau_minus)
        plan = anomalous_reflection_plan(channels, lc, weights, cfg.tx_power_w,
                                         cfg.noise_power_w,
                                         cfg.snr_thresholds_linear)
        axes = [np.arange(levels) * 2.0 * np.pi / levels] * n
        grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n)
        for k in range(channels.n_users):
            snr_grid = snr_direct(channels, k, grid, plan.beamformer,
                                  cfg.noise_power_w)
            gap = (float(np.max(snr_grid)) - plan.achieved_snr[k]) \
                / plan.achieved_snr[k]
            worst = max(worst, gap)
            n_checked += 1
    return SuiteResult("benchmark optimality", worst <= tol, worst, tol,
                       n_checked, time.time() - t0)


def run_all():
    return [
        check_quadratic_equivalence(),
        check_transition_times(),
        check_gradient(),
        check_benchmark_optimality(),
    ]
