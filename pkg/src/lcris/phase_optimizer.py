"""Transition-aware RIS phase design for a cyclic TDMA schedule.

The TDMA cycle visits the K user configurations in order, so configuration k
is always entered from configuration k-1 (cyclically).  The design objective
penalizes those transitions, weighting phase decreases more than increases
because the LC decay is the slow direction, subject to every user keeping its
SNR above threshold:

    minimize  sum_k || c_k o (w_k - w_{k-1}) ||^2
    s.t.      SNR_k(w_k) >= gamma_k,   clamp_lo <= w <= clamp_hi,

with c = c_plus on nonnegative differences and c_minus otherwise.  The solver
is a cyclic best-response sweep: each user update minimizes, element by
element, the frozen-z element Lagrangian

    L_n(w) = c_n (w - w_prev,n)^2 - 2 lambda_k r_n cos(w - phi_n)

inside a trust region of half-width delta around the current iterate, where
r e^{j phi} = z = M s is held fixed during the step (the trust region is what
keeps that freeze accurate) and w_prev is the cyclic predecessor.  Steps whose
resulting modeled SNR violates the threshold are reverted and the dual weight
lambda is raised by 1/alpha; accepted steps relax it by alpha.  Everything is
initialised at the per-user co-phased (anomalous reflection) configuration,
which is also the benchmark design.
"""

import csv
from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleDesignError
from .precoder import composite_quadratic, los_beamformer, snr_direct

TWO_PI = 2.0 * np.pi
_BISECT_ITERS = 48  # grid cell ~1e-2 rad halved 48 times: well under 1e-10


@dataclass(frozen=True)
class TransitionWeights:
    """Asymmetric transition-cost weights; decays cost more than rises."""

    c_plus: float
    c_minus: float

    def __post_init__(self):
        if not (self.c_minus > self.c_plus > 0.0):
            raise ValueError("need c_minus > c_plus > 0")


def weights_from_taus(tau_plus, tau_minus):
    """Weights proportional to sqrt(tau): c_plus = sqrt(t+/t-), c_minus = 1."""
    if not tau_minus > tau_plus > 0.0:
        raise ValueError("need tau_minus > tau_plus > 0")
    return TransitionWeights(c_plus=float(np.sqrt(tau_plus / tau_minus)), c_minus=1.0)


@dataclass(frozen=True)
class OptimizerParams:
    snr_thresholds: tuple          # per user, linear SNR
    alpha: float = 0.985           # dual relaxation factor, in (0, 1)
    i_max: int = 100
    delta: float = np.pi / 8.0     # trust-region half-width, rad
    lambda_init: float = None      # None = auto-scale from the instance
    line_search_points: int = 64   # bracketing grid size per element

    def __post_init__(self):
        thr = tuple(float(g) for g in self.snr_thresholds)
        if len(thr) == 0 or any(g < 0.0 for g in thr):
            raise ValueError("snr_thresholds must be nonnegative, one per user")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")
        if self.i_max < 1:
            raise ValueError("i_max must be >= 1")
        if not 0.0 < self.delta < np.pi:
            raise ValueError("delta must lie in (0, pi)")
        if self.lambda_init is not None and not self.lambda_init > 0.0:
            raise ValueError("lambda_init must be positive (or None for auto)")
        if self.line_search_points < 4:
            raise ValueError("line_search_points must be >= 4")
        object.__setattr__(self, "snr_thresholds", thr)


@dataclass(frozen=True)
class PhasePlan:
    """Output of a design run: per-user phases plus diagnostics."""

    phases: np.ndarray        # (K, N) rad
    beamformer: object        # Beamformer shared by all users
    achieved_snr: np.ndarray  # (K,) linear, re-verified through the direct path
    cost: float               # weighted transition cost of `phases`
    feasible: bool            # all achieved_snr >= thresholds (direct path)
    iterations_run: int
    lambda_trace: np.ndarray  # (iterations, K)
    snr_trace: np.ndarray     # (iterations, K) modeled SNR after each update
    accepted: np.ndarray      # (iterations, K) bool
    cost_trace: np.ndarray    # (iterations,)


def cyclic_delta(phases, k):
    """Transition k: w_k - w_{k-1}, with user 0 entered from the last user."""
    w = np.asarray(phases, dtype=float)
    if w.ndim != 2:
        raise ValueError("phases must be (K, N)")
    return w[k] - w[k - 1]


def _signed_weights(delta, weights):
    return np.where(delta >= 0.0, weights.c_plus, weights.c_minus)


def weighted_cost(phases, weights):
    """sum_k ||c_k o delta_k||^2 over the cyclic transitions."""
    w = np.asarray(phases, dtype=float)
    total = 0.0
    for k in range(w.shape[0]):
        d = cyclic_delta(w, k)
        total += float(np.sum((_signed_weights(d, weights) * d) ** 2))
    return total


def element_lagrangian(omega_n, omega_prev_n, lambda_k, r_n, phi_n, weight_cn):
    """c (w - w_prev)^2 - 2 lambda r cos(w - phi), elementwise."""
    return weight_cn * (omega_n - omega_prev_n) ** 2 \
        - 2.0 * lambda_k * r_n * np.cos(omega_n - phi_n)


def lagrangian_gradient(phases_k, prev_phases, lambda_k, snr_q, weights):
    """Gradient 2 c o delta - 2 lambda r o sin(phi - w) at the current point."""
    w = np.asarray(phases_k, dtype=float)
    prev = np.asarray(prev_phases, dtype=float)
    z = snr_q.z(w)
    r, phi = np.abs(z), np.angle(z)
    d = w - prev
    return 2.0 * _signed_weights(d, weights) * d \
        - 2.0 * lambda_k * r * np.sin(phi - w)


def line_search_step(user_k, phases, snr_q, lambda_k, params, weights, lc):
    """Per-element minimizer of the frozen-z element Lagrangian.

    Candidates per element: every node of the line_search_points grid over
    the trust-region/clamp interval (endpoints included), the projected
    transition-free point (the predecessor's phase, where the cost term has
    its kink and its minimum), and every stationary point found by bracketing
    the gradient's sign changes on that grid and bisecting to 1e-10 rad.
    Keeping the full grid in the candidate set means the result can never
    lose to an exhaustive search over the same grid.  Ties go to the
    smallest move |w - w_prev|, then to the lower phase.
    """
    w = np.asarray(phases, dtype=float)
    cur = w[user_k]
    prev = w[user_k - 1]  # cyclic predecessor; K = 1 wraps to the user itself
    z = snr_q.z(cur)
    r, phi = np.abs(z), np.angle(z)
    lo = np.maximum(cur - params.delta, lc.clamp_lo)
    hi = np.minimum(cur + params.delta, lc.clamp_hi)

    def grad(x, idx):
        c = np.where(x >= prev[idx], weights.c_plus, weights.c_minus)
        return 2.0 * c * (x - prev[idx]) \
            + 2.0 * lambda_k * r[idx] * np.sin(x - phi[idx])

    n = cur.size
    t = np.linspace(0.0, 1.0, params.line_search_points)
    grid = lo + (hi - lo) * t[:, np.newaxis]              # (G, N)
    gval = grad(grid, np.arange(n))
    bracket = (gval[:-1] * gval[1:]) < 0.0                # strict sign changes

    rows, cols = np.nonzero(bracket)
    blo, bhi = grid[rows, cols], grid[rows + 1, cols]
    flo = gval[rows, cols]
    for _ in range(_BISECT_ITERS):
        mid = 0.5 * (blo + bhi)
        fmid = grad(mid, cols)
        take_lo = (fmid * flo) > 0.0
        blo = np.where(take_lo, mid, blo)
        flo = np.where(take_lo, fmid, flo)
        bhi = np.where(take_lo, bhi, mid)
    roots = 0.5 * (blo + bhi)

    g = params.line_search_points
    counts = np.zeros(n, dtype=int)
    for c in cols:
        counts[c] += 1
    max_roots = int(counts.max()) if len(cols) else 0
    cand = np.full((n, g + 1 + max_roots), np.nan)
    cand[:, :g] = grid.T
    cand[:, g] = np.clip(prev, lo, hi)
    fill = np.full(n, g + 1, dtype=int)
    for c, x in zip(cols, roots):
        cand[c, fill[c]] = x
        fill[c] += 1

    obj = element_lagrangian(
        cand, prev[:, np.newaxis], lambda_k, r[:, np.newaxis],
        phi[:, np.newaxis],
        np.where(cand >= prev[:, np.newaxis], weights.c_plus, weights.c_minus))
    obj = np.where(np.isnan(cand), np.inf, obj)

    out = np.empty(n)
    move = np.abs(cand - prev[:, np.newaxis])
    for i in range(n):
        j = np.lexsort((cand[i], move[i], obj[i]))[0]
        out[i] = cand[i, j]
    return out


def _co_phased(model, lc):
    w = np.mod(-np.angle(model.m), TWO_PI)
    return np.clip(w, lc.clamp_lo, lc.clamp_hi)


def _auto_lambda(weights, model, w0):
    # balance the per-element cost scale against the SNR-term scale at init,
    # then start three decades below it (cost-driven until rejections push up)
    r0 = np.abs(model.z(w0))
    return 1e-3 * weights.c_minus * np.pi ** 2 / max(2.0 * float(np.mean(r0)), 1e-300)


def _check_feasible(models, thresholds):
    max_snr = np.array([mdl.max_snr() for mdl in models])
    if np.any(max_snr < thresholds):
        raise InfeasibleDesignError(
            "SNR thresholds exceed the co-phased upper bound for user(s) "
            f"{np.nonzero(max_snr < thresholds)[0].tolist()}",
            max_snr=max_snr, thresholds=np.asarray(thresholds))
    return max_snr


def anomalous_reflection_plan(channels, lc, weights, p_t, noise_power, snr_thresholds):
    """Benchmark design: each user gets its own co-phased configuration."""
    thresholds = np.asarray(snr_thresholds, dtype=float)
    q = los_beamformer(channels.bs_array, channels.bs_aod, p_t)
    models = [composite_quadratic(channels, k, q, noise_power)
              for k in range(channels.n_users)]
    w = np.stack([_co_phased(mdl, lc) for mdl in models])
    achieved = np.array([snr_direct(channels, k, w[k], q, noise_power)
                         for k in range(channels.n_users)])
    k_users = channels.n_users
    return PhasePlan(
        phases=w,
        beamformer=q,
        achieved_snr=achieved,
        cost=weighted_cost(w, weights),
        feasible=bool(np.all(achieved >= thresholds)),
        iterations_run=0,
        lambda_trace=np.zeros((0, k_users)),
        snr_trace=np.zeros((0, k_users)),
        accepted=np.zeros((0, k_users), dtype=bool),
        cost_trace=np.zeros(0),
    )


def run_algorithm1(channels, lc, weights, params, p_t, noise_power, init_plan=None):
    """Cyclic sweep with per-element line searches and dual-weight adaptation.

    The modeled (rank-one) SNR gates each step; the returned plan's
    achieved_snr and feasible flag are re-verified through the direct path so
    model drift on Rician channels cannot silently overstate feasibility.
    Raises InfeasibleDesignError when a threshold exceeds the co-phased upper
    bound of the model.
    """
    k_users = channels.n_users
    thresholds = np.asarray(params.snr_thresholds, dtype=float)
    if thresholds.shape != (k_users,):
        raise ValueError("need one SNR threshold per user")
    q = los_beamformer(channels.bs_array, channels.bs_aod, p_t)
    models = [composite_quadratic(channels, k, q, noise_power)
              for k in range(k_users)]
    _check_feasible(models, thresholds)

    if init_plan is None:
        w = np.stack([_co_phased(mdl, lc) for mdl in models])
    else:
        w = np.array(init_plan.phases, dtype=float)
        if w.shape[0] != k_users:
            raise ValueError("init_plan user count mismatch")
        if np.any(w < lc.clamp_lo) or np.any(w > lc.clamp_hi):
            raise ValueError("init_plan phases outside the clamp range")

    lam = np.array([
        params.lambda_init if params.lambda_init is not None
        else _auto_lambda(weights, models[k], w[k])
        for k in range(k_users)
    ])

    lam_trace = np.zeros((params.i_max, k_users))
    snr_trace = np.zeros((params.i_max, k_users))
    accepted = np.zeros((params.i_max, k_users), dtype=bool)
    cost_trace = np.zeros(params.i_max)

    for i in range(params.i_max):
        for k in range(k_users):
            cand = line_search_step(k, w, models[k], lam[k], params, weights, lc)
            snr_k = models[k].snr(cand)
            if snr_k >= thresholds[k]:
                w[k] = cand
                lam[k] *= params.alpha
                accepted[i, k] = True
            else:
                lam[k] /= params.alpha
            lam_trace[i, k] = lam[k]
            snr_trace[i, k] = models[k].snr(w[k])
        cost_trace[i] = weighted_cost(w, weights)

    achieved = np.array([snr_direct(channels, k, w[k], q, noise_power)
                         for k in range(k_users)])
    return PhasePlan(
        phases=w,
        beamformer=q,
        achieved_snr=achieved,
        cost=weighted_cost(w, weights),
        feasible=bool(np.all(achieved >= thresholds)),
        iterations_run=params.i_max,
        lambda_trace=lam_trace,
        snr_trace=snr_trace,
        accepted=accepted,
        cost_trace=cost_trace,
    )


def dump_iteration_trace(plan, path):
    """Per-iteration CSV: iteration,user,lambda,snr,accepted,cost."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iteration", "user", "lambda", "snr", "accepted", "cost"])
        for i in range(plan.iterations_run):
            for k in range(plan.phases.shape[0]):
                writer.writerow([
                    i, k, repr(float(plan.lambda_trace[i, k])),
                    repr(float(plan.snr_trace[i, k])),
                    int(plan.accepted[i, k]), repr(float(plan.cost_trace[i])),
                ])
