import numpy as np
import pytest

from mimopn.channel import generate_channel, pilot_estimate
from mimopn.link import mrc_detect, synthesize_frame, theta_matrix_oracle
from mimopn.phase_noise import generate_trace, generate_trace_batch
from mimopn.rng import stream

TWO_DEG = np.deg2rad(2.0)


def _bpsk(rng, n):
    return (rng.integers(0, 2, n) * 2 - 1).astype(float)


def _setup(n_ant, n_sc, length, key, bs_per_antenna=True, ue_std=TWO_DEG, bs_std=TWO_DEG):
    rng = stream(key, 100)
    ue = generate_trace(length, ue_std, rng).samples
    if bs_per_antenna:
        bs = generate_trace_batch(n_ant, length, bs_std, rng)
    else:
        bs = generate_trace(length, bs_std, rng).samples
    g = generate_channel(n_ant, n_sc, rng).g
    return rng, ue, bs, g


def test_zero_pn_zero_noise_reduces_to_channel_product():
    rng, ue, bs, g = _setup(8, 16, 16, key=1, ue_std=0.0, bs_std=0.0)
    c = _bpsk(rng, 16)
    frame = synthesize_frame(g, ue, bs, c, 0, 0.25, 0.0, rng)
    np.testing.assert_allclose(frame.y, np.sqrt(0.25) * g * c[None, :], atol=1e-12)
    np.testing.assert_allclose(frame.ici_part, 0.0, atol=1e-12)


def test_single_subcarrier_pure_cpe_rotation():
    rng, ue, bs, g = _setup(4, 1, 1, key=2)
    c = np.array([-1.0])
    frame = synthesize_frame(g, ue, bs, c, 0, 0.5, 0.04, rng)
    expected = np.sqrt(0.5) * np.exp(1j * (ue[0] + bs[:, 0]))[:, None] * g * c
    np.testing.assert_allclose(frame.y - frame.awgn_part, expected, atol=1e-12)


def test_fast_path_matches_block_matrix_oracle():
    rng, ue, bs, g = _setup(4, 8, 24, key=3)
    c = _bpsk(rng, 8)
    fast = synthesize_frame(g, ue, bs, c, 8, 0.1, 0.0, rng)
    oracle = theta_matrix_oracle(g, ue, bs, c, 8, 0.1)
    assert np.max(np.abs(fast.y - oracle.y)) < 1e-10


def test_two_subcarrier_hand_expansion():
    # Nc=2, M=1: theta_0 = (e^{j psi_0} + e^{j psi_1})/2,
    # theta_1 = (e^{j psi_0} - e^{j psi_1})/2 = theta_{-1};
    # y_0 = sqrt(P) (theta_0 g_0 c_0 + theta_1 g_1 c_1)
    # y_1 = sqrt(P) (theta_1 g_0 c_0 + theta_0 g_1 c_1)
    rng, ue, bs, g = _setup(1, 2, 2, key=4, bs_per_antenna=False)
    c = np.array([1.0, -1.0])
    power = 0.3
    psi = ue[:2] + bs[:2]
    t0 = (np.exp(1j * psi[0]) + np.exp(1j * psi[1])) / 2.0
    t1 = (np.exp(1j * psi[0]) - np.exp(1j * psi[1])) / 2.0
    y0 = np.sqrt(power) * (t0 * g[0, 0] * c[0] + t1 * g[0, 1] * c[1])
    y1 = np.sqrt(power) * (t1 * g[0, 0] * c[0] + t0 * g[0, 1] * c[1])
    oracle = theta_matrix_oracle(g, ue, bs, c, 0, power)
    np.testing.assert_allclose(oracle.y[0], [y0, y1], atol=1e-14)
    fast = synthesize_frame(g, ue, bs, c, 0, power, 0.0, rng)
    np.testing.assert_allclose(fast.y[0], [y0, y1], atol=1e-14)


def test_oracle_zero_pn_is_identity_blocked():
    rng, ue, bs, g = _setup(2, 4, 4, key=5, ue_std=0.0, bs_std=0.0)
    c = _bpsk(rng, 4)
    oracle = theta_matrix_oracle(g, ue, bs, c, 0, 1.0)
    np.testing.assert_allclose(oracle.y, g * c[None, :], atol=1e-13)


def test_oracle_cap_enforced():
    rng, ue, bs, g = _setup(80, 64, 64, key=6)
    with pytest.raises(ValueError, match="cap"):
        theta_matrix_oracle(g, ue, bs, np.ones(64), 0, 1.0)


def test_frame_sum_identity_bit_exact():
    rng, ue, bs, g = _setup(8, 16, 16, key=7)
    frame = synthesize_frame(g, ue, bs, _bpsk(rng, 16), 0, 0.25, 0.1, rng)
    assert np.array_equal(frame.y, (frame.signal_part + frame.ici_part) + frame.awgn_part)


def test_trace_too_short_rejected():
    rng, ue, bs, g = _setup(2, 8, 8, key=8)
    with pytest.raises(ValueError, match="too short"):
        synthesize_frame(g, ue, bs, np.ones(8), 4, 1.0, 0.0, rng)


def test_symbol_count_mismatch_rejected():
    rng, ue, bs, g = _setup(2, 8, 8, key=9)
    with pytest.raises(ValueError, match="symbols"):
        synthesize_frame(g, ue, bs, np.ones(4), 0, 1.0, 0.0, rng)


def test_received_power_tracks_noise_floor():
    # With P = 1: E|y|^2 = 1 + sigma_w^2 (unit theta energy, unit channel)
    noise_var = 0.3
    total = 0.0
    count = 0
    for key in range(30):
        rng, ue, bs, g = _setup(40, 64, 64, key=200 + key)
        frame = synthesize_frame(g, ue, bs, _bpsk(rng, 64), 0, 1.0, noise_var, rng)
        total += float(np.sum(np.abs(frame.y) ** 2))
        count += frame.y.size
    assert total / count == pytest.approx(1.0 + noise_var, rel=0.01)


def _one_detection(key, n_ant=16, n_sc=16, delay=32, noise_var=0.05, compensation=None,
                   ue_std=TWO_DEG, bs_std=TWO_DEG):
    length = delay + n_sc
    rng, ue, bs, g = _setup(n_ant, n_sc, length, key=key, ue_std=ue_std, bs_std=bs_std)
    pilot = synthesize_frame(g, ue, bs, np.ones(n_sc), 0, 0.25, noise_var, rng, role="pilot")
    data = synthesize_frame(g, ue, bs, _bpsk(rng, n_sc), delay, 0.25, noise_var, rng, role="data")
    g_col = pilot_estimate(pilot).g_hat[:, 0]
    if compensation is not None:
        g_col = compensation * g_col
    return mrc_detect(g_col, data, pilot, compensation=compensation), pilot, data


def test_decomposition_identity_random_trials():
    for key in range(25):
        bd, _, _ = _one_detection(key=300 + key)
        assert abs(bd.c_hat - bd.parts_sum()) / abs(bd.c_hat) < 1e-10


def test_classical_mrc_limit():
    # zero phase noise, zero AWGN: c_hat = P c_0 sum |g|^2, no ICI/noise terms
    n_ant, n_sc = 16, 8
    rng, ue, bs, g = _setup(n_ant, n_sc, 16, key=11, ue_std=0.0, bs_std=0.0)
    power = 0.25
    pilot = synthesize_frame(g, ue, bs, np.ones(n_sc), 0, power, 0.0, rng, role="pilot")
    c = _bpsk(rng, n_sc)
    data = synthesize_frame(g, ue, bs, c, 8, power, 0.0, rng, role="data")
    bd = mrc_detect(pilot_estimate(pilot).g_hat[:, 0], data, pilot)
    expected = power * c[0] * np.sum(np.abs(g[:, 0]) ** 2)
    assert bd.c_hat == pytest.approx(expected, rel=1e-12)
    assert abs(bd.t_ici) < 1e-12
    assert abs(bd.t_awgn) < 1e-12


def test_snr_invariant_to_common_phase_origin():
    # noiseless frames: rotating all initial phases by a constant leaves the
    # realized SNR unchanged
    n_ant, n_sc, delay = 8, 16, 32
    rng, ue, bs, g = _setup(n_ant, n_sc, delay + n_sc, key=12)
    c = _bpsk(rng, n_sc)

    def snr_for(offset):
        ue_s = ue + offset
        bs_s = bs + offset
        pilot = synthesize_frame(g, ue_s, bs_s, np.ones(n_sc), 0, 0.25, 0.0, rng, role="pilot")
        data = synthesize_frame(g, ue_s, bs_s, c, delay, 0.25, 0.0, rng, role="data")
        return mrc_detect(pilot_estimate(pilot).g_hat[:, 0], data, pilot).snr_inst

    base, shifted = snr_for(0.0), snr_for(0.7)
    assert shifted == pytest.approx(base, rel=1e-9)


def test_mrc_requires_pilot_ground_truth():
    bd, pilot, data = _one_detection(key=13)
    with pytest.raises(ValueError, match="pilot"):
        mrc_detect(pilot_estimate(pilot).g_hat[:, 0], data, data)
    with pytest.raises(ValueError, match="data"):
        mrc_detect(pilot_estimate(pilot).g_hat[:, 0], pilot, pilot)


def test_mrc_rejects_inconsistent_estimate():
    bd, pilot, data = _one_detection(key=14)
    wrong = pilot_estimate(pilot).g_hat[:, 0] * 1.5
    with pytest.raises(ValueError, match="inconsistent"):
        mrc_detect(wrong, data, pilot)
