"""Kalman tracking of the common phase error over the extended training.

The CPE coefficient of each oscillator follows, across consecutive OFDM
symbols, a first-order autoregression theta' = rho * theta + v with
rho = exp(-(sigma_bs^2 + sigma_ue^2)/2). During the gap between the channel
pilot and the data symbol the UE keeps transmitting all-ones training
symbols with the per-subcarrier power rescaled to P*Nc/D, and the filter
assimilates the subcarrier-0 observation of each symbol using the known
channel as the observation gain.

CO runs one complex scalar state updated sequentially by the M per-antenna
observations; DO runs M independent scalar filters, one observation each.
No matrix inversions are needed in either case.
"""

from dataclasses import dataclass, replace
import numpy as np

from .channel import ChannelEstimate
from .phase_noise import ar1_rho, mean_cpe_magnitude


@dataclass
class KalmanState:
    theta_hat: np.ndarray    # complex CPE estimates; length 1 (CO) or M (DO)
    err_var: np.ndarray      # posterior error variances, same length
    rho: float               # AR(1) coefficient
    process_var: float       # q, per-step state-noise variance
    obs_noise_var: float     # r for extension symbols, AWGN plus scaled ICI
    steps_done: int = 0      # measurement updates applied so far


def extension_power(config) -> float:
    """Per-subcarrier power of the rescaled training-extension symbols."""
    return config.power * config.n_subcarriers / config.delay_samples


def init(config, sigma_ici_sq: float) -> KalmanState:
    """Deterministic initial state: zero-phase origin with a spread prior.

    The prior error variance 1 - |E theta_0|^2 matches the spread of the
    CPE around the origin; any positive prior converges, this only shapes
    the transient.
    """
    if config.delay_samples == 0:
        raise ValueError("CPE tracking needs a training extension (delay_samples > 0)")
    rho = ar1_rho(config.sigma_phi_ue_rad**2, config.sigma_phi_bs_rad**2)
    if config.kalman_q_mode == "paper":
        q = config.n_subcarriers * (1.0 - rho**2)
    else:
        q = 1.0 - rho**2
    r = config.noise_var + extension_power(config) * sigma_ici_sq
    n_states = 1 if config.scenario == "CO" else config.n_antennas
    prior = 1.0 - mean_cpe_magnitude(config.n_subcarriers,
                                     config.sigma_phi_ue_rad**2 + config.sigma_phi_bs_rad**2) ** 2
    return KalmanState(theta_hat=np.ones(n_states, dtype=complex),
                       err_var=np.full(n_states, prior),
                       rho=rho, process_var=q, obs_noise_var=float(r))


def step(state: KalmanState, frame, true_channel_col: np.ndarray, config,
         sigma_ici_sq: float) -> KalmanState:
    """Predict-and-update with one training symbol's subcarrier-0 samples.

    Accepts the power-P pilot (the filter's first observation) and the
    rescaled training-extension symbols; anything else, or a power tag that
    does not match the role, is rejected. The first update skips prediction
    since the prior already refers to the pilot time.
    """
    if frame.role == "pilot":
        expected = config.power
    elif frame.role == "training-extension":
        expected = extension_power(config)
    else:
        raise ValueError(f"filter cannot consume frames with role {frame.role!r}")
    if not np.isclose(frame.power, expected, rtol=1e-9):
        raise ValueError(
            f"power tag {frame.power} does not match {expected} expected for role {frame.role!r}"
        )

    g = np.asarray(true_channel_col)
    y = frame.y[:, 0]
    h = np.sqrt(frame.power) * g
    r = config.noise_var + frame.power * sigma_ici_sq

    if state.steps_done > 0:
        x = state.rho * state.theta_hat
        p = state.rho**2 * state.err_var + state.process_var
    else:
        x = state.theta_hat.copy()
        p = state.err_var.copy()

    if state.theta_hat.shape[0] == 1:
        # CO: one state, M scalar observations applied sequentially.
        xs, ps = complex(x[0]), float(p[0])
        for m in range(len(y)):
            gain = ps * np.conj(h[m]) / (abs(h[m]) ** 2 * ps + r)
            xs = xs + gain * (y[m] - h[m] * xs)
            ps = float((1.0 - (gain * h[m]).real) * ps)
        x_new = np.array([xs])
        p_new = np.array([ps])
    else:
        # DO: M independent scalar filters, one observation each.
        gain = p * np.conj(h) / (np.abs(h) ** 2 * p + r)
        x_new = x + gain * (y - h * x)
        p_new = (1.0 - (gain * h).real) * p

    return replace(state, theta_hat=x_new, err_var=p_new, steps_done=state.steps_done + 1)


def compensation_factor(theta_hat_final: np.ndarray, theta_hat_training: np.ndarray,
                        mode: str = "relative") -> np.ndarray:
    """Per-oscillator rotation applied to the training channel estimate.

    relative: theta_D * conj(theta_0) / |theta_0|^2, the rotation between
    the data-time and training-time CPE. The training estimate already
    carries the training-time CPE, so this is the factor that reduces to a
    no-op without phase noise.
    absolute: theta_D itself (the literal product form), kept for
    comparison.
    """
    final = np.asarray(theta_hat_final)
    if mode == "absolute":
        return final.copy()
    if mode != "relative":
        raise ValueError(f"unknown compensation mode {mode!r}")
    train = np.asarray(theta_hat_training)
    if train.shape != final.shape:
        raise ValueError(f"estimate shapes differ: {final.shape} vs {train.shape}")
    mag_sq = np.abs(train) ** 2
    if np.any(mag_sq == 0):
        raise ValueError("training-time CPE estimate is zero; relative rotation undefined")
    return final * np.conj(train) / mag_sq


def compensate(theta_hat_final: np.ndarray, g_hat_training: ChannelEstimate,
               theta_hat_training: np.ndarray | None = None,
               mode: str = "relative") -> ChannelEstimate:
    """Rotate the training estimate to data time: per antenna and
    subcarrier, compensated g_hat = factor * g_hat_training."""
    if mode == "relative" and theta_hat_training is None:
        raise ValueError("relative compensation needs the training-time estimate")
    factor = compensation_factor(theta_hat_final, theta_hat_training, mode)
    g_hat = g_hat_training.g_hat
    if factor.shape[0] not in (1, g_hat.shape[0]):
        raise ValueError(f"{factor.shape[0]} factors cannot rotate {g_hat.shape[0]} antennas")
    if factor.shape[0] == 1:
        return ChannelEstimate(g_hat=factor[0] * g_hat)
    return ChannelEstimate(g_hat=factor[:, None] * g_hat)
