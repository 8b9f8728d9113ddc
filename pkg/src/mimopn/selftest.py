"""Quick oracle-equivalence checks, runnable from the CLI.

A condensed version of the test suite's cross-implementation checks: the
FFT frame path against the block-matrix product, the factorized phase-noise
terms against the literal summation, the MRC decomposition identity, and
noiseless Kalman recovery.
"""

from dataclasses import replace

import numpy as np

from .analytic import pn_terms, pn_terms_literal
from .channel import generate_channel, pilot_estimate
from .config import SystemConfig, validate
from . import kalman
from .link import mrc_detect, synthesize_frame, theta_matrix_oracle
from .phase_noise import generate_trace_batch
from .rng import stream


def _check_frame_oracle() -> float:
    worst = 0.0
    for n_sc in (2, 4, 8):
        for n_ant in (1, 2, 4):
            for seed in range(5):
                rng = stream(seed, n_sc, n_ant, 101)
                ue = generate_trace_batch(1, n_sc, 0.03, rng)[0]
                bs = generate_trace_batch(n_ant, n_sc, 0.03, rng)
                g = generate_channel(n_ant, n_sc, rng).g
                c = rng.integers(0, 2, n_sc) * 2.0 - 1.0
                fast = synthesize_frame(g, ue, bs, c, 0, 0.25, 0.0, rng)
                oracle = theta_matrix_oracle(g, ue, bs, c, 0, 0.25)
                worst = max(worst, float(np.max(np.abs(fast.y - oracle.y))))
    return worst


def _check_pn_oracle() -> float:
    worst = 0.0
    for n_sc in (4, 8):
        for scenario in ("CO", "DO"):
            cfg = validate(SystemConfig(n_subcarriers=n_sc, delay_samples=4 * n_sc,
                                        scenario=scenario))
            for seed in range(5):
                rng = stream(seed, n_sc, 202)
                ue = generate_trace_batch(1, cfg.trace_length, cfg.sigma_phi_ue_rad, rng)[0]
                bs = generate_trace_batch(1, cfg.trace_length, cfg.sigma_phi_bs_rad, rng)[0]
                fast = pn_terms(ue, bs, cfg)
                lit = pn_terms_literal(ue, bs, cfg)
                for a, b in ((fast.pn1, lit.pn1), (fast.pn2, lit.pn2), (fast.pn3, lit.pn3),
                             (fast.pn4, lit.pn4), (fast.pn5, lit.pn5)):
                    worst = max(worst, abs(a - b) / max(abs(b), 1e-30))
                worst = max(worst, abs(lit.pn5 - 1.0))
    return worst


def _check_decomposition() -> float:
    cfg = validate(SystemConfig())
    worst = 0.0
    for trial in range(20):
        rng = stream(cfg.seed, trial, 303)
        ue = generate_trace_batch(1, cfg.trace_length, cfg.sigma_phi_ue_rad, rng)[0]
        bs = generate_trace_batch(1, cfg.trace_length, cfg.sigma_phi_bs_rad, rng)[0]
        g = generate_channel(cfg.n_antennas, cfg.n_subcarriers, rng).g
        ones = np.ones(cfg.n_subcarriers)
        pilot = synthesize_frame(g, ue, bs, ones, 0, cfg.power, cfg.noise_var, rng, role="pilot")
        c = rng.integers(0, 2, cfg.n_subcarriers) * 2.0 - 1.0
        data = synthesize_frame(g, ue, bs, c, cfg.delay_samples, cfg.power, cfg.noise_var, rng)
        bd = mrc_detect(pilot_estimate(pilot).g_hat[:, 0], data, pilot)
        worst = max(worst, abs(bd.c_hat - bd.parts_sum()) / abs(bd.c_hat))
    return worst


def _check_kalman() -> float:
    # Single subcarrier: the observation is pure CPE (no ICI) and exactly
    # invertible once the observation noise vanishes.
    cfg = validate(SystemConfig(n_antennas=4, n_subcarriers=1, delay_samples=2, scenario="DO"))
    rng = stream(7, 404)
    ue = generate_trace_batch(1, cfg.trace_length, cfg.sigma_phi_ue_rad, rng)[0]
    bs = generate_trace_batch(cfg.n_antennas, cfg.trace_length, cfg.sigma_phi_bs_rad, rng)
    g = generate_channel(cfg.n_antennas, cfg.n_subcarriers, rng).g
    frame = synthesize_frame(g, ue, bs, np.ones(1), 0, cfg.power, 0.0, rng, role="pilot")
    state = kalman.init(cfg, 0.0)
    state = replace(state, err_var=np.full(cfg.n_antennas, 10.0), process_var=0.0)
    tiny = replace(cfg, noise_var=1e-20)
    state = kalman.step(state, frame, g[:, 0], tiny, 0.0)
    theta_true = frame.signal_part[:, 0] / (np.sqrt(cfg.power) * g[:, 0])
    return float(np.max(np.abs(state.theta_hat - theta_true)))


def run_selftest() -> bool:
    """Run the oracle checks; print one line per check, return overall pass."""
    checks = [
        ("frame fast path vs block-matrix oracle", _check_frame_oracle, 1e-10),
        ("phase-noise terms vs literal summation", _check_pn_oracle, 1e-10),
        ("MRC decomposition identity", _check_decomposition, 1e-10),
        ("noiseless Kalman recovery", _check_kalman, 1e-6),
    ]
    ok = True
    for name, fn, tol in checks:
        err = fn()
        passed = err < tol
        ok = ok and passed
        print(f"{'ok  ' if passed else 'FAIL'} {name}: max error {err:.3e} (tol {tol:.0e})")
    return ok
