import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from lumenlens.ber import (ber_monte_carlo, ber_upper_bound, bound_from_distances, pair_distances,
                           q_function)
from lumenlens.gsm import GsmConfig, build_signal_set
from lumenlens.optics import channel_matrix


def bound_oracle(H, ss, cfg):
    # literal double sum over ordered pairs
    L, eta = len(ss), ss.eta
    total = 0.0
    for m in range(L):
        for n in range(L):
            if m == n:
                continue
            dh = int(np.sum(ss.bits[m] != ss.bits[n]))
            dist = np.linalg.norm(H @ (ss.vectors[m] - ss.vectors[n]))
            total += dh * q_function(cfg.gain * dist / (2 * cfg.noise_std))
    return total / (eta * L)


def test_q_values():
    assert q_function(0.0) == 0.5
    assert q_function(-8.0) == pytest.approx(1.0, abs=1e-15)
    ref, _ = quad(lambda t: np.exp(-t * t / 2) / np.sqrt(2 * np.pi), 1.0, np.inf,
                  epsabs=1e-14, epsrel=1e-14)
    assert q_function(1.0) == pytest.approx(ref, abs=1e-10)


def test_bound_zero_channel_two_bits():
    cfg = GsmConfig(2, 1)
    ss = build_signal_set(cfg)
    assert ber_upper_bound(np.zeros((4, 2)), ss, cfg) == pytest.approx(1.0, abs=1e-15)


def test_bound_vanishes_without_noise(rng):
    cfg = GsmConfig(4, 2, noise_std=1e-30)
    ss = build_signal_set(cfg)
    H = rng.uniform(1e-6, 1e-5, (4, 4))
    assert ber_upper_bound(H, ss, cfg) == 0.0


def test_bound_matches_pairwise_oracle(rng):
    cfg = GsmConfig(4, 2, noise_std=2e-6)
    ss = build_signal_set(cfg)
    H = rng.uniform(0, 1e-5, (4, 4))
    assert ber_upper_bound(H, ss, cfg) == pytest.approx(bound_oracle(H, ss, cfg), rel=1e-12)


def test_distances_scale_linearly(rng):
    ss = build_signal_set(GsmConfig(16, 2))
    H = rng.uniform(0, 1e-5, (16, 16))
    np.testing.assert_allclose(pair_distances(3.0 * H, ss), 3.0 * pair_distances(H, ss), rtol=1e-13)


@given(st.integers(0, 2**32 - 1), st.floats(1e-7, 1e-5), st.floats(1.01, 10))
@settings(max_examples=30, deadline=None)
def test_bound_properties(seed, sigma, k):
    rng = np.random.default_rng(seed)
    cfg = GsmConfig(4, 2, noise_std=sigma)
    ss = build_signal_set(cfg)
    H = rng.uniform(0, 1e-5, (9, 4))
    b = ber_upper_bound(H, ss, cfg)
    assert b >= 0
    assert ber_upper_bound(H, ss, GsmConfig(4, 2, noise_std=sigma * k)) >= b
    perm = rng.permutation(9)
    assert ber_upper_bound(H[perm], ss, cfg) == pytest.approx(b, rel=1e-12, abs=1e-300)


def test_bound_from_distances_by_hand():
    cfg = GsmConfig(2, 1)
    ss = build_signal_set(cfg)
    d = pair_distances(np.zeros((1, 2)), ss)
    ham = np.array([1, 1, 2, 2, 1, 1], dtype=float)
    assert bound_from_distances(d, ham, cfg, 2) == pytest.approx(1.0)


def test_mc_noise_free_is_error_free(rng):
    cfg = GsmConfig(16, 2, noise_std=1e-30)
    ss = build_signal_set(cfg)
    H = rng.uniform(0, 1e-5, (16, 16))
    est = ber_monte_carlo(H, ss, cfg, 5000, rng)
    assert est.value == 0.0 and est.trials == 5000


def test_mc_zero_channel_is_coin_flip(rng):
    cfg = GsmConfig(16, 2)
    ss = build_signal_set(cfg)
    est = ber_monte_carlo(np.zeros((16, 16)), ss, cfg, 20_000, rng, max_errors=None)
    assert abs(est.value - 0.5) <= 4 * est.std_error


def test_mc_early_exit_and_reproducible():
    cfg = GsmConfig(16, 2)
    ss = build_signal_set(cfg)
    a = ber_monte_carlo(np.zeros((16, 16)), ss, cfg, 100_000, np.random.default_rng(4))
    b = ber_monte_carlo(np.zeros((16, 16)), ss, cfg, 100_000, np.random.default_rng(4))
    assert a == b
    assert a.trials == 1000 and a.errors >= 100


def test_mc_rejects_zero_trials(rng):
    cfg = GsmConfig(2, 1)
    with pytest.raises(ValueError):
        ber_monte_carlo(np.zeros((1, 2)), build_signal_set(cfg), cfg, 0, rng)


def test_mc_below_bound_on_default_scenario(cfg):
    pose = cfg.pose(0.3, np.deg2rad(3))
    H = channel_matrix(cfg, pose, cfg.lens(0.15, 4.45, np.deg2rad(10)))
    b = ber_upper_bound(H, cfg.signal_set, cfg.gsm)
    est = ber_monte_carlo(H, cfg.signal_set, cfg.gsm, 100_000, np.random.default_rng(8))
    assert 0 < b < 1
    assert est.value <= b + 3 * est.std_error
