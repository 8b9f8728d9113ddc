"""OFDM frame synthesis and MRC detection with an exact term split.

The received frequency-domain symbol per antenna is synthesized on the fast
path as fft(exp(j*phase) * ifft(g .* c)) scaled by sqrt(power), which is
mathematically identical to multiplying the stacked M*Nc vector by the
banded block matrix of phase-noise DFT coefficients. The block-matrix
product is kept as `theta_matrix_oracle` for equivalence testing only.

Every frame stores its CPE-weighted signal part, ICI part and AWGN part
separately so the MRC statistic can be decomposed exactly.
"""

from dataclasses import dataclass
import numpy as np

from .phase_noise import theta_rows
from .rng import complex_normal

FRAME_ROLES = ("pilot", "data", "training-extension")


@dataclass
class ReceivedFrame:
    """One received OFDM symbol across antennas, with ground truth.

    y = (signal_part + ici_part) + awgn_part holds bit-exactly with that
    summation order.
    """
    y: np.ndarray            # (M, Nc) received samples
    signal_part: np.ndarray  # (M, Nc) CPE-rotated desired part
    ici_part: np.ndarray     # (M, Nc) inter-carrier leakage
    awgn_part: np.ndarray    # (M, Nc) additive noise
    symbols: np.ndarray      # (Nc,) BPSK symbols used in synthesis
    role: str                # "pilot" | "data" | "training-extension"
    power: float             # per-subcarrier transmit power
    window_start: int        # first time sample of this OFDM symbol


@dataclass
class SnrBreakdown:
    """Exact split of the MRC statistic on one subcarrier."""
    t_sig: complex
    t_ici: complex
    t_awgn: complex
    snr_inst: float
    c_hat: complex

    def parts_sum(self) -> complex:
        return self.t_sig + self.t_ici + self.t_awgn


def _combined_phase(ue_trace: np.ndarray, bs_traces: np.ndarray, window_start: int, n_sc: int):
    """Phase window per link; (Nc,) when the BS oscillator is shared."""
    lo, hi = window_start, window_start + n_sc
    ue = np.asarray(ue_trace)
    bs = np.asarray(bs_traces)
    if lo < 0 or hi > ue.shape[-1] or hi > bs.shape[-1]:
        raise ValueError(
            f"trace too short: window [{lo}, {hi}) exceeds trace length "
            f"{min(ue.shape[-1], bs.shape[-1])}"
        )
    return ue[lo:hi] + bs[..., lo:hi]


def synthesize_frame(channel_g: np.ndarray, ue_trace: np.ndarray, bs_traces: np.ndarray,
                     symbols: np.ndarray, window_start: int, power: float,
                     noise_var: float, rng, role: str = "data") -> ReceivedFrame:
    """Received OFDM symbol for the window starting at `window_start`.

    bs_traces is (length,) in the common-oscillator case (shared by all
    antennas) or (M, length) with one row per antenna.
    """
    g = np.asarray(channel_g)
    n_ant, n_sc = g.shape
    symbols = np.asarray(symbols)
    if symbols.shape != (n_sc,):
        raise ValueError(f"expected {n_sc} symbols, got shape {symbols.shape}")
    if power <= 0:
        raise ValueError(f"power must be positive, got {power}")
    if role not in FRAME_ROLES:
        raise ValueError(f"role must be one of {FRAME_ROLES}, got {role!r}")

    psi = _combined_phase(ue_trace, bs_traces, window_start, n_sc)
    rot = np.exp(1j * psi)                      # (Nc,) or (M, Nc)
    base = np.fft.ifft(g * symbols[None, :], axis=1)
    if rot.ndim == 1:
        noiseless = np.sqrt(power) * np.fft.fft(rot[None, :] * base, axis=1)
        theta0 = np.fft.ifft(rot)[0]            # shared CPE coefficient
        cpe = theta0 * np.ones(n_ant)
    else:
        noiseless = np.sqrt(power) * np.fft.fft(rot * base, axis=1)
        cpe = np.fft.ifft(rot, axis=1)[:, 0]    # per-antenna CPE

    signal_part = np.sqrt(power) * cpe[:, None] * g * symbols[None, :]
    ici_part = noiseless - signal_part
    if noise_var > 0:
        awgn_part = complex_normal(rng, (n_ant, n_sc), var=noise_var)
    else:
        awgn_part = np.zeros((n_ant, n_sc), dtype=complex)
    y = (signal_part + ici_part) + awgn_part
    return ReceivedFrame(y=y, signal_part=signal_part, ici_part=ici_part,
                         awgn_part=awgn_part, symbols=symbols, role=role,
                         power=float(power), window_start=int(window_start))


MATRIX_ORACLE_CAP = 4096


def theta_matrix_oracle(channel_g: np.ndarray, ue_trace: np.ndarray, bs_traces: np.ndarray,
                        symbols: np.ndarray, window_start: int, power: float) -> ReceivedFrame:
    """Noiseless frame via the explicit M*Nc x M*Nc block-matrix product.

    Block (r, c) is diag over antennas of the DFT coefficient with index
    (c - r) mod Nc; the stacked vector is subcarrier-major. Intended for
    correctness tests only, with M*Nc capped.
    """
    g = np.asarray(channel_g)
    n_ant, n_sc = g.shape
    if n_ant * n_sc > MATRIX_ORACLE_CAP:
        raise ValueError(f"M*Nc = {n_ant * n_sc} exceeds oracle cap {MATRIX_ORACLE_CAP}")
    symbols = np.asarray(symbols)
    if symbols.shape != (n_sc,):
        raise ValueError(f"expected {n_sc} symbols, got shape {symbols.shape}")

    psi = _combined_phase(ue_trace, bs_traces, window_start, n_sc)
    if psi.ndim == 1:
        psi = np.broadcast_to(psi, (n_ant, n_sc))
    theta = theta_rows(psi)                     # (M, Nc)

    dim = n_ant * n_sc
    big = np.zeros((dim, dim), dtype=complex)
    for r in range(n_sc):
        for c in range(n_sc):
            coeff = theta[:, (c - r) % n_sc]
            rows = r * n_ant + np.arange(n_ant)
            big[rows, c * n_ant + np.arange(n_ant)] = coeff

    x = (g * symbols[None, :]).T.reshape(-1)    # subcarrier-major stacking
    y_stacked = np.sqrt(power) * big @ x
    noiseless = y_stacked.reshape(n_sc, n_ant).T

    signal_part = np.sqrt(power) * theta[:, 0:1] * g * symbols[None, :]
    ici_part = noiseless - signal_part
    awgn_part = np.zeros_like(noiseless)
    return ReceivedFrame(y=(signal_part + ici_part) + awgn_part, signal_part=signal_part,
                         ici_part=ici_part, awgn_part=awgn_part, symbols=symbols,
                         role="data", power=float(power), window_start=int(window_start))


def mrc_detect(g_hat: np.ndarray, data_frame: ReceivedFrame, pilot_frame: ReceivedFrame,
               compensation: np.ndarray | None = None, subcarrier: int = 0) -> SnrBreakdown:
    """MRC on one subcarrier with the exact SIG/ICI/AWGN split.

    The estimate is split as g_hat = f * (a + wt) where a is the pilot's
    noiseless CPE part and wt its ICI-plus-AWGN contamination (f is the
    optional CPE compensation factor, per antenna or scalar). The desired
    term pairs the noiseless pilot with the data CPE part, the ICI term
    pairs it with the data ICI, and everything touching noise, including
    wt against the whole received data vector, lands in t_awgn. The three
    terms sum to the raw statistic c_hat = g_hat^H y.
    """
    if pilot_frame.role != "pilot":
        raise ValueError("pilot ground truth missing: second frame must have role 'pilot'")
    if data_frame.role != "data":
        raise ValueError(f"detection expects a data frame, got role={data_frame.role!r}")
    sc = subcarrier
    a = pilot_frame.signal_part[:, sc]
    wt = pilot_frame.ici_part[:, sc] + pilot_frame.awgn_part[:, sc]
    if compensation is not None:
        f = np.asarray(compensation)
        a = f * a
        wt = f * wt
    g_col = np.asarray(g_hat)[:, sc] if np.asarray(g_hat).ndim == 2 else np.asarray(g_hat)
    if not np.allclose(g_col, a + wt, rtol=1e-9, atol=1e-12):
        raise ValueError("g_hat column is inconsistent with the pilot ground truth")

    y = data_frame.y[:, sc]
    t_sig = np.vdot(a, data_frame.signal_part[:, sc])
    t_ici = np.vdot(a, data_frame.ici_part[:, sc])
    t_awgn = np.vdot(a, data_frame.awgn_part[:, sc]) + np.vdot(wt, y)
    c_hat = np.vdot(g_col, y)

    denom = abs(t_ici) ** 2 + abs(t_awgn) ** 2
    snr = abs(t_sig) ** 2 / denom if denom > 0 else np.inf
    return SnrBreakdown(t_sig=complex(t_sig), t_ici=complex(t_ici),
                        t_awgn=complex(t_awgn), snr_inst=float(snr), c_hat=complex(c_hat))
