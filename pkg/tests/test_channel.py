import numpy as np
import pytest

from mimopn.channel import generate_channel, pilot_estimate
from mimopn.link import synthesize_frame
from mimopn.phase_noise import generate_trace
from mimopn.rng import stream

TWO_DEG = np.deg2rad(2.0)


def test_entry_power_and_fourth_moment():
    g = generate_channel(1000, 1000, stream(0, 1)).g  # 1e6 entries
    p = np.abs(g) ** 2
    assert np.mean(p) == pytest.approx(1.0, rel=0.01)
    assert np.mean(p**2) == pytest.approx(2.0, rel=0.02)


def test_cross_antenna_independence():
    n = 500_000
    g = generate_channel(2, n, stream(0, 2)).g
    cross = np.mean(g[0] * np.conj(g[1]))
    # per-sample variance of the product is 1, so the complex mean lies
    # within 3/sqrt(n) with overwhelming probability
    assert abs(cross) < 3.0 / np.sqrt(n)


def test_invalid_dimensions_rejected():
    with pytest.raises(ValueError):
        generate_channel(0, 4, stream(0, 3))


def _pilot_frame(n_ant, n_sc, power, noise_var, ue_std, bs_std, key):
    rng = stream(key, 4)
    total = n_sc
    ue = generate_trace(total, ue_std, rng).samples
    bs = generate_trace(total, bs_std, rng).samples
    g = generate_channel(n_ant, n_sc, rng).g
    frame = synthesize_frame(g, ue, bs, np.ones(n_sc), 0, power, noise_var, rng, role="pilot")
    return g, frame


def test_noiseless_zero_pn_estimate_equals_channel():
    g, frame = _pilot_frame(8, 16, 1.0, 0.0, 0.0, 0.0, key=5)
    est = pilot_estimate(frame)
    np.testing.assert_allclose(est.g_hat, g, atol=1e-12)


def test_single_subcarrier_pure_cpe():
    # Nc = 1: no ICI, estimate is the rotated channel exactly
    rng = stream(6, 4)
    ue = generate_trace(1, TWO_DEG, rng).samples
    bs = generate_trace(1, TWO_DEG, rng).samples
    g = generate_channel(4, 1, rng).g
    frame = synthesize_frame(g, ue, bs, np.ones(1), 0, 1.0, 0.0, rng, role="pilot")
    est = pilot_estimate(frame)
    np.testing.assert_allclose(est.g_hat, np.exp(1j * (ue[0] + bs[0])) * g, atol=1e-12)


def test_estimate_decomposition_bookkeeping_bit_exact():
    _, frame = _pilot_frame(8, 16, 0.25, 0.05, TWO_DEG, TWO_DEG, key=7)
    est = pilot_estimate(frame)
    reconstructed = (frame.signal_part + frame.ici_part) + frame.awgn_part
    assert np.array_equal(est.g_hat, reconstructed)


def test_estimate_is_linear_in_received_frame():
    _, frame = _pilot_frame(4, 8, 0.25, 0.05, TWO_DEG, TWO_DEG, key=8)
    base = pilot_estimate(frame).g_hat
    frame.y = 2.0 * frame.y
    assert np.array_equal(pilot_estimate(frame).g_hat, 2.0 * base)


def test_zero_pn_zero_awgn_scaled_identity():
    power = 0.04
    g, frame = _pilot_frame(8, 16, power, 0.0, 0.0, 0.0, key=9)
    est = pilot_estimate(frame)
    np.testing.assert_allclose(est.g_hat, np.sqrt(power) * g, atol=1e-13)


def test_non_pilot_frame_rejected():
    _, frame = _pilot_frame(4, 8, 1.0, 0.0, 0.0, 0.0, key=10)
    frame.role = "data"
    with pytest.raises(ValueError, match="pilot"):
        pilot_estimate(frame)
