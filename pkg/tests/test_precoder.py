"""Beamforming and SNR-form tests, including the LOS-regime equivalences."""

import dataclasses

import numpy as np
import pytest

from lcris.config import LinkSet, ScenarioConfig
from lcris.errors import RegimeError
from lcris.geometry_channel import (LinkParams, build_scenario_channels,
                                    steering_vector)
from lcris.precoder import (Beamformer, composite_quadratic, los_beamformer,
                            matched_filter, snr_direct, snr_quadratic_form)

NOISE_W = 3.1697863849222223e-13


def los_config(**kw):
    links = LinkSet(
        bs_ris=LinkParams(k_factor=np.inf, pathloss_exponent=2.0),
        ris_ue=LinkParams(k_factor=np.inf, pathloss_exponent=2.0),
        bs_ue=LinkParams(k_factor=np.inf, pathloss_exponent=3.5),
    )
    kw.setdefault("blockage", 0.0)
    return dataclasses.replace(ScenarioConfig(), links=links, **kw)


def rician_config(**kw):
    return dataclasses.replace(ScenarioConfig(), **kw)


def test_beamformer_power_accounting():
    w = np.ones(4, dtype=complex)
    bf = Beamformer(w, power_budget=4.0)
    assert bf.power == pytest.approx(4.0)
    with pytest.raises(ValueError):
        Beamformer(2.0 * w, power_budget=4.0)


def test_matched_filter_norm_and_direction():
    rng = np.random.default_rng(0)
    h = rng.normal(size=8) + 1j * rng.normal(size=8)
    bf = matched_filter(h, p_t=2.5)
    assert bf.power == pytest.approx(2.5, rel=1e-12)
    # collinear with h
    corr = np.abs(np.vdot(h, bf.weights)) / (np.linalg.norm(h) * np.linalg.norm(bf.weights))
    assert corr == pytest.approx(1.0, rel=1e-12)
    with pytest.raises(ValueError):
        matched_filter(np.zeros(4, dtype=complex), 1.0)


def test_matched_filter_beats_random_beamformers():
    rng = np.random.default_rng(42)
    h = rng.normal(size=16) + 1j * rng.normal(size=16)
    p_t = 3.0
    best = np.abs(np.vdot(h, matched_filter(h, p_t).weights)) ** 2
    for _ in range(1000):
        w = rng.normal(size=16) + 1j * rng.normal(size=16)
        w *= np.sqrt(p_t) / np.linalg.norm(w)
        assert np.abs(np.vdot(h, w)) ** 2 <= best * (1.0 + 1e-12)


def test_snr_direct_matches_elementwise_sum():
    cfg = rician_config()
    ch = build_scenario_channels(cfg, rng_seed=1)
    q = los_beamformer(ch.bs_array, ch.bs_aod, cfg.tx_power_w)
    rng = np.random.default_rng(2)
    w = rng.uniform(0.0, 2.0 * np.pi, ch.ris_array.size)
    # reference: scalar loop over RIS elements and BS antennas
    amp = 0.0 + 0.0j
    for i in range(ch.bs_array.size):
        amp += np.conj(ch.h_direct[0, i]) * q.weights[i]
    for n in range(ch.ris_array.size):
        inner = 0.0 + 0.0j
        for i in range(ch.bs_array.size):
            inner += ch.H_bs_ris[n, i] * q.weights[i]
        amp += np.exp(1j * w[n]) * np.conj(ch.h_ris_user[0, n]) * inner
    expect = np.abs(amp) ** 2 / cfg.noise_power_w
    assert snr_direct(ch, 0, w, q, cfg.noise_power_w) == pytest.approx(expect, rel=1e-12)


def test_snr_direct_batched_matches_scalar():
    cfg = rician_config()
    ch = build_scenario_channels(cfg, rng_seed=4)
    q = los_beamformer(ch.bs_array, ch.bs_aod, cfg.tx_power_w)
    rng = np.random.default_rng(3)
    stack = rng.uniform(0.0, 2.0 * np.pi, (7, ch.ris_array.size))
    batched = snr_direct(ch, 1, stack, q, cfg.noise_power_w)
    assert batched.shape == (7,)
    for t in range(7):
        assert batched[t] == pytest.approx(
            snr_direct(ch, 1, stack[t], q, cfg.noise_power_w), rel=1e-12)


def test_quadratic_form_equivalence_in_los_regime():
    rng = np.random.default_rng(10)
    for i in range(50):
        cfg = los_config(user_range_m=float(rng.uniform(3.0, 12.0)))
        ch = build_scenario_channels(cfg, rng_seed=int(rng.integers(1 << 30)))
        q = los_beamformer(ch.bs_array, ch.bs_aod, cfg.tx_power_w)
        quad = snr_quadratic_form(ch, i % 2, q, cfg.noise_power_w)
        w = rng.uniform(0.0, 2.0 * np.pi, ch.ris_array.size)
        assert quad.snr(w) == pytest.approx(
            snr_direct(ch, i % 2, w, q, cfg.noise_power_w), rel=1e-10)


def test_quadratic_form_kappa_value():
    cfg = los_config()
    ch = build_scenario_channels(cfg, rng_seed=0)
    q = los_beamformer(ch.bs_array, ch.bs_aod, cfg.tx_power_w)
    quad = snr_quadratic_form(ch, 0, q, cfg.noise_power_w)
    a_bs = steering_vector(ch.bs_array, ch.bs_aod)
    a_ris = steering_vector(ch.ris_array, ch.ris_aoa)
    chi = (a_ris.conj() @ ch.H_bs_ris @ a_bs) / (a_ris.size * a_bs.size)
    # the |a_bs|^2 factor: |h_eff^H q| = |chi| |m^T s| sqrt(P) ||a_bs||
    kappa = np.abs(chi) ** 2 * cfg.tx_power_w * a_bs.size / cfg.noise_power_w
    assert quad.scale == pytest.approx(kappa, rel=1e-12)
    np.testing.assert_allclose(
        np.abs(quad.m), np.abs(ch.h_ris_user[0].conj() * a_ris), rtol=1e-12)


def test_quadratic_form_regime_checks():
    cfg_ric = rician_config()
    ch = build_scenario_channels(cfg_ric, rng_seed=0)
    q = los_beamformer(ch.bs_array, ch.bs_aod, cfg_ric.tx_power_w)
    with pytest.raises(RegimeError):
        snr_quadratic_form(ch, 0, q, NOISE_W)

    cfg_blocked = los_config(blockage=1.0)
    ch2 = build_scenario_channels(cfg_blocked, rng_seed=0)
    q2 = los_beamformer(ch2.bs_array, ch2.bs_aod, cfg_blocked.tx_power_w)
    with pytest.raises(RegimeError):
        snr_quadratic_form(ch2, 0, q2, NOISE_W)

    cfg = los_config()
    ch3 = build_scenario_channels(cfg, rng_seed=0)
    bad_q = Beamformer(np.sqrt(cfg.tx_power_w / ch3.bs_array.size)
                       * np.exp(1j * np.arange(ch3.bs_array.size)),
                       cfg.tx_power_w)
    with pytest.raises(RegimeError):
        snr_quadratic_form(ch3, 0, bad_q, NOISE_W)
    # the escape hatch downgrades all three to a model
    quad = snr_quadratic_form(ch, 0, q, NOISE_W, require_los_regime=False)
    assert quad.max_snr() > 0.0


def test_composite_quadratic_exact_on_rician_draws():
    # blocked direct path: the composite form equals snr_direct exactly
    cfg = rician_config()
    rng = np.random.default_rng(20)
    for seed in range(10):
        ch = build_scenario_channels(cfg, rng_seed=seed)
        q = los_beamformer(ch.bs_array, ch.bs_aod, cfg.tx_power_w)
        for k in range(ch.n_users):
            quad = composite_quadratic(ch, k, q, cfg.noise_power_w)
            w = rng.uniform(0.0, 2.0 * np.pi, ch.ris_array.size)
            assert quad.snr(w) == pytest.approx(
                snr_direct(ch, k, w, q, cfg.noise_power_w), rel=1e-12)


def test_quadratic_global_phase_invariance():
    cfg = rician_config()
    ch = build_scenario_channels(cfg, rng_seed=6)
    q = los_beamformer(ch.bs_array, ch.bs_aod, cfg.tx_power_w)
    quad = composite_quadratic(ch, 0, q, cfg.noise_power_w)
    rng = np.random.default_rng(1)
    w = rng.uniform(0.0, 2.0 * np.pi, ch.ris_array.size)
    for shift in (0.3, 1.7, -2.2):
        assert quad.snr(w + shift) == pytest.approx(quad.snr(w), rel=1e-10)


def test_quadratic_cophasing_attains_max():
    cfg = rician_config()
    ch = build_scenario_channels(cfg, rng_seed=8)
    q = los_beamformer(ch.bs_array, ch.bs_aod, cfg.tx_power_w)
    quad = composite_quadratic(ch, 1, q, cfg.noise_power_w)
    w_star = np.mod(-np.angle(quad.m), 2.0 * np.pi)
    assert quad.snr(w_star) == pytest.approx(quad.max_snr(), rel=1e-10)
    rng = np.random.default_rng(2)
    for _ in range(200):
        w = rng.uniform(0.0, 2.0 * np.pi, ch.ris_array.size)
        assert quad.snr(w) <= quad.max_snr() * (1.0 + 1e-12)


def test_single_element_ris_phase_invariance():
    cfg = rician_config()
    cfg = dataclasses.replace(
        cfg, ris_array=dataclasses.replace(cfg.ris_array, n_y=1, n_z=1))
    ch = build_scenario_channels(cfg, rng_seed=0)
    q = los_beamformer(ch.bs_array, ch.bs_aod, cfg.tx_power_w)
    vals = [snr_direct(ch, 0, np.array([w]), q, cfg.noise_power_w)
            for w in (0.0, 1.0, 2.0, 5.0)]
    np.testing.assert_allclose(vals, vals[0], rtol=1e-12)
