"""Solver tests: cost bookkeeping, line search optimality, dual updates."""

import dataclasses

import numpy as np
import pytest

from lcris.config import ScenarioConfig
from lcris.errors import InfeasibleDesignError
from lcris.geometry_channel import build_scenario_channels
from lcris.lc_dynamics import LcParams
from lcris.phase_optimizer import (OptimizerParams, TransitionWeights,
                                   anomalous_reflection_plan, cyclic_delta,
                                   element_lagrangian, lagrangian_gradient,
                                   line_search_step, run_algorithm1,
                                   weighted_cost, weights_from_taus)
from lcris.precoder import SnrQuadratic


def make_quadratic(rng, n, scale=1.0):
    m = rng.normal(size=n) + 1j * rng.normal(size=n)
    return SnrQuadratic(m=m, scale=scale, user_k=0)


def test_weights_from_taus_frozen_value():
    w = weights_from_taus(0.005, 0.024)
    assert w.c_plus == pytest.approx(0.45643546458763845, rel=1e-15)
    assert w.c_minus == 1.0
    with pytest.raises(ValueError):
        weights_from_taus(0.024, 0.005)
    with pytest.raises(ValueError):
        TransitionWeights(c_plus=1.0, c_minus=0.5)


def test_weighted_cost_hand_example():
    # K=2, N=1: transition 2->0 decays (cost 2^2), 0->2 rises (cost (0.5*2)^2)
    w = np.array([[0.0], [2.0]])
    weights = TransitionWeights(c_plus=0.5, c_minus=1.0)
    assert weighted_cost(w, weights) == pytest.approx(5.0, rel=1e-15)
    assert weighted_cost(np.array([[1.3], [1.3]]), weights) == 0.0


def test_cyclic_delta_wraps_to_last_user():
    w = np.array([[0.0, 1.0], [2.0, 0.5], [1.0, 1.0]])
    np.testing.assert_allclose(cyclic_delta(w, 0), w[0] - w[2])
    np.testing.assert_allclose(cyclic_delta(w, 2), w[2] - w[1])
    with pytest.raises(ValueError):
        cyclic_delta(np.zeros(3), 0)


def test_weighted_cost_uses_sign_dependent_weights():
    weights = TransitionWeights(c_plus=0.5, c_minus=1.0)
    w = np.array([[1.0, 0.0], [0.0, 1.0]])
    # user 0 entered from user 1: deltas (+1, -1); user 1 from user 0: (-1, +1)
    expect = (0.5 ** 2 + 1.0) + (1.0 + 0.5 ** 2)
    assert weighted_cost(w, weights) == pytest.approx(expect, rel=1e-15)


def test_element_lagrangian_hand_value():
    val = element_lagrangian(1.0, 0.5, 2.0, 3.0, 1.0, 0.25)
    assert val == pytest.approx(0.25 * 0.25 - 12.0 * np.cos(0.0), rel=1e-12)


def test_lagrangian_gradient_matches_finite_differences():
    rng = np.random.default_rng(3)
    weights = weights_from_taus(0.005, 0.024)
    for _ in range(100):
        n = int(rng.integers(2, 7))
        quad = make_quadratic(rng, n)
        prev = rng.uniform(0.5, 5.5, n)
        # keep every coordinate at least 1e-3 from the weight kink at prev
        offs = rng.uniform(1e-2, 0.4, n) * rng.choice([-1.0, 1.0], n)
        w = prev + offs
        lam = float(rng.uniform(0.0, 2.0))

        def full_lagrangian(x):
            d = x - prev
            c = np.where(d >= 0.0, weights.c_plus, weights.c_minus)
            return float(np.sum(c * d ** 2) - lam * quad.snr(x))

        grad = lagrangian_gradient(w, prev, lam, quad, weights)
        eps = 1e-6
        for i in range(n):
            e = np.zeros(n)
            e[i] = eps
            fd = (full_lagrangian(w + e) - full_lagrangian(w - e)) / (2.0 * eps)
            assert grad[i] == pytest.approx(fd, rel=1e-5, abs=1e-7)


def line_search_instance(rng, n=5, lam=1.0):
    lc = LcParams()
    weights = weights_from_taus(0.005, 0.024)
    params = OptimizerParams(snr_thresholds=(0.0,))
    quad = make_quadratic(rng, n)
    w = np.stack([rng.uniform(0.2, 2.0 * np.pi - 0.2, n) for _ in range(2)])
    return lc, weights, params, quad, w, lam


def test_line_search_zero_lambda_returns_predecessor():
    rng = np.random.default_rng(8)
    lc, weights, params, quad, w, _ = line_search_instance(rng)
    # keep the predecessor inside the trust region
    w[0] = w[1] + rng.uniform(-0.9, 0.9, w.shape[1]) * params.delta
    w = np.clip(w, lc.clamp_lo, lc.clamp_hi)
    out = line_search_step(1, w, quad, 0.0, params, weights, lc)
    np.testing.assert_array_equal(out, w[0])


def test_line_search_identical_rows_is_fixed_point():
    rng = np.random.default_rng(9)
    lc, weights, params, quad, w, _ = line_search_instance(rng)
    w[0] = w[1]
    out = line_search_step(1, w, quad, 0.0, params, weights, lc)
    np.testing.assert_array_equal(out, w[1])


def test_line_search_beats_dense_grid():
    rng = np.random.default_rng(11)
    for lam in (0.0, 0.01, 0.3, 3.0, 50.0):
        for _ in range(6):
            lc, weights, params, quad, w, _ = line_search_instance(rng)
            out = line_search_step(1, w, quad, lam, params, weights, lc)
            cur, prev = w[1], w[0]
            z = quad.z(cur)
            r, phi = np.abs(z), np.angle(z)
            lo = np.maximum(cur - params.delta, lc.clamp_lo)
            hi = np.minimum(cur + params.delta, lc.clamp_hi)
            assert np.all(out >= lo) and np.all(out <= hi)
            for i in range(cur.size):
                dense = np.linspace(lo[i], hi[i], 100001)
                c = np.where(dense >= prev[i], weights.c_plus, weights.c_minus)
                val = element_lagrangian(dense, prev[i], lam, r[i], phi[i], c)
                c_out = weights.c_plus if out[i] >= prev[i] else weights.c_minus
                got = element_lagrangian(out[i], prev[i], lam, r[i], phi[i], c_out)
                assert got <= val.min() + 1e-8 * (1.0 + abs(val.min()))


def test_line_search_huge_lambda_tracks_phi():
    rng = np.random.default_rng(13)
    lc, weights, params, quad, w, _ = line_search_instance(rng)
    cur = w[1]
    z = quad.z(cur)
    phi = np.mod(np.angle(z), 2.0 * np.pi)
    out = line_search_step(1, w, quad, 1e9, params, weights, lc)
    lo = np.maximum(cur - params.delta, lc.clamp_lo)
    hi = np.minimum(cur + params.delta, lc.clamp_hi)
    inside = (phi > lo + 1e-6) & (phi < hi - 1e-6)
    # wherever the SNR-only optimum lies inside the interval it must be hit
    np.testing.assert_allclose(out[inside], phi[inside], atol=1e-6)


def single_user_config():
    return dataclasses.replace(ScenarioConfig(),
                               user_directions_deg=((-10.0, 33.0),))


def test_algorithm_k1_with_met_threshold_keeps_init():
    cfg = single_user_config()
    lc = cfg.lc
    weights = weights_from_taus(lc.tau_plus, lc.tau_minus)
    ch = build_scenario_channels(cfg, rng_seed=0)
    params = cfg.optimizer_params()
    bench = anomalous_reflection_plan(ch, lc, weights, cfg.tx_power_w,
                                      cfg.noise_power_w, cfg.snr_thresholds_linear)
    # co-phased init strictly inside the clamp, so it is an exact fixed point
    assert np.all(bench.phases > lc.clamp_lo) and np.all(bench.phases < lc.clamp_hi)
    plan = run_algorithm1(ch, lc, weights, params, cfg.tx_power_w, cfg.noise_power_w)
    np.testing.assert_array_equal(plan.phases, bench.phases)
    assert plan.cost == 0.0
    assert plan.feasible


def test_algorithm_zero_threshold_drives_cost_to_zero():
    cfg = ScenarioConfig()
    lc = cfg.lc
    weights = weights_from_taus(lc.tau_plus, lc.tau_minus)
    ch = build_scenario_channels(cfg, rng_seed=1)
    params = dataclasses.replace(cfg.optimizer_params(),
                                 snr_thresholds=(0.0, 0.0))
    plan = run_algorithm1(ch, lc, weights, params, cfg.tx_power_w, cfg.noise_power_w)
    assert np.all(plan.accepted)
    start = plan.cost_trace[0]
    assert plan.cost < 1e-6 * start
    np.testing.assert_allclose(plan.phases[0], plan.phases[1], atol=5e-3)


def test_algorithm_dual_updates_use_exact_factors():
    cfg = ScenarioConfig()
    lc = cfg.lc
    weights = weights_from_taus(lc.tau_plus, lc.tau_minus)
    ch = build_scenario_channels(cfg, rng_seed=2)
    params = dataclasses.replace(cfg.optimizer_params(), lambda_init=0.5, i_max=40)
    plan = run_algorithm1(ch, lc, weights, params, cfg.tx_power_w, cfg.noise_power_w)
    lam = np.full(2, 0.5)
    for i in range(params.i_max):
        for k in range(2):
            expect = lam[k] * params.alpha if plan.accepted[i, k] \
                else lam[k] / params.alpha
            assert plan.lambda_trace[i, k] == expect
            lam[k] = expect
    assert plan.accepted.any() and not plan.accepted.all()


def test_algorithm_model_snr_never_below_threshold():
    cfg = ScenarioConfig()
    lc = cfg.lc
    weights = weights_from_taus(lc.tau_plus, lc.tau_minus)
    for seed in (0, 3, 7):
        ch = build_scenario_channels(cfg, rng_seed=seed)
        plan = run_algorithm1(ch, lc, weights, cfg.optimizer_params(),
                              cfg.tx_power_w, cfg.noise_power_w)
        thr = np.asarray(cfg.snr_thresholds_linear)
        assert np.all(plan.snr_trace >= thr[np.newaxis, :] * (1.0 - 1e-12))
        assert plan.feasible


def test_algorithm_infeasible_raises_with_diagnostics():
    cfg = ScenarioConfig()
    lc = cfg.lc
    weights = weights_from_taus(lc.tau_plus, lc.tau_minus)
    ch = build_scenario_channels(cfg, rng_seed=0)
    params = dataclasses.replace(cfg.optimizer_params(),
                                 snr_thresholds=(1e12, 1e12))
    with pytest.raises(InfeasibleDesignError) as err:
        run_algorithm1(ch, lc, weights, params, cfg.tx_power_w, cfg.noise_power_w)
    assert err.value.max_snr.shape == (2,)
    assert np.all(err.value.thresholds == 1e12)


def test_anomalous_plan_attains_model_maximum():
    cfg = ScenarioConfig()
    lc = cfg.lc
    weights = weights_from_taus(lc.tau_plus, lc.tau_minus)
    ch = build_scenario_channels(cfg, rng_seed=5)
    plan = anomalous_reflection_plan(ch, lc, weights, cfg.tx_power_w,
                                     cfg.noise_power_w, cfg.snr_thresholds_linear)
    from lcris.precoder import composite_quadratic
    for k in range(2):
        quad = composite_quadratic(ch, k, plan.beamformer, cfg.noise_power_w)
        if np.all(plan.phases[k] > lc.clamp_lo) and np.all(plan.phases[k] < lc.clamp_hi):
            assert quad.snr(plan.phases[k]) == pytest.approx(quad.max_snr(), rel=1e-12)
        assert plan.achieved_snr[k] == pytest.approx(quad.snr(plan.phases[k]), rel=1e-12)
    assert plan.cost == pytest.approx(weighted_cost(plan.phases, weights), rel=1e-15)
    assert plan.feasible


def test_optimizer_params_validation():
    with pytest.raises(ValueError):
        OptimizerParams(snr_thresholds=())
    with pytest.raises(ValueError):
        OptimizerParams(snr_thresholds=(1.0,), alpha=1.0)
    with pytest.raises(ValueError):
        OptimizerParams(snr_thresholds=(1.0,), i_max=0)
    with pytest.raises(ValueError):
        OptimizerParams(snr_thresholds=(1.0,), delta=0.0)
    with pytest.raises(ValueError):
        OptimizerParams(snr_thresholds=(-1.0,))
    with pytest.raises(ValueError):
        OptimizerParams(snr_thresholds=(1.0,), line_search_points=2)


def test_dump_iteration_trace(tmp_path):
    import csv
    cfg = ScenarioConfig()
    lc = cfg.lc
    weights = weights_from_taus(lc.tau_plus, lc.tau_minus)
    ch = build_scenario_channels(cfg, rng_seed=0)
    params = dataclasses.replace(cfg.optimizer_params(), i_max=5)
    plan = run_algorithm1(ch, lc, weights, params, cfg.tx_power_w, cfg.noise_power_w)
    from lcris.phase_optimizer import dump_iteration_trace
    path = tmp_path / "trace.csv"
    dump_iteration_trace(plan, path)
    with open(path) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 5 * 2
    assert float(rows[0]["lambda"]) == plan.lambda_trace[0, 0]
    assert rows[3]["accepted"] in ("0", "1")
