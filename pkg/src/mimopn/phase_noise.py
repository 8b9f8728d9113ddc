"""Wiener (random-walk) oscillator phase noise and its DFT coefficients.

A free-running oscillator contributes a phase path phi[j] = phi[j-1] + d[j]
with i.i.d. Gaussian increments d ~ N(0, sigma^2). The effect on one OFDM
symbol is captured by the DFT coefficients of the unit-modulus sequence
exp(j*phase) over the symbol's Nc time samples: coefficient 0 is the common
phase error (CPE) rotating every subcarrier equally, the rest drive
inter-carrier interference (ICI).
"""

from dataclasses import dataclass
import numpy as np


@dataclass
class PhaseTrace:
    """One oscillator's realized phase path, in radians."""
    samples: np.ndarray
    increment_var: float


@dataclass
class ThetaCoefficients:
    """DFT coefficients theta[n] of exp(j*phase) over one OFDM symbol.

    For unit-modulus input, sum_n |theta[n]|^2 = 1 (Parseval), and a constant
    zero phase gives theta = [1, 0, ..., 0].
    """
    values: np.ndarray


def generate_trace_batch(n_traces: int, length: int, increment_std: float, rng) -> np.ndarray:
    """(n_traces, length) array of independent Wiener paths starting at 0."""
    if length < 1:
        raise ValueError(f"trace length must be >= 1, got {length}")
    if increment_std < 0:
        raise ValueError(f"increment_std must be nonnegative, got {increment_std}")
    out = np.zeros((n_traces, length))
    if length > 1 and increment_std > 0:
        incr = increment_std * rng.standard_normal((n_traces, length - 1))
        np.cumsum(incr, axis=1, out=out[:, 1:])
    return out


def generate_trace(length: int, increment_std: float, rng) -> PhaseTrace:
    """Single Wiener phase path; deterministic given the stream state."""
    samples = generate_trace_batch(1, length, increment_std, rng)[0]
    return PhaseTrace(samples=samples, increment_var=float(increment_std) ** 2)


def theta_rows(phase_windows: np.ndarray) -> np.ndarray:
    """DFT coefficients for each row of phase samples.

    theta[n] = (1/Nc) * sum_k exp(+j*2*pi*k*n/Nc) * exp(j*phase[k]), which is
    numpy's ifft of the unit-modulus sequence (an FFT scaled by 1/Nc).
    """
    return np.fft.ifft(np.exp(1j * phase_windows), axis=-1)


def theta_coefficients(ue_segment: np.ndarray, bs_segment: np.ndarray) -> ThetaCoefficients:
    """Coefficients for one oscillator pair over one OFDM symbol window.

    Both segments must cover the same Nc time samples; the link phase is
    their sum.
    """
    ue = np.asarray(ue_segment, dtype=float)
    bs = np.asarray(bs_segment, dtype=float)
    if ue.shape != bs.shape or ue.ndim != 1:
        raise ValueError(f"segments must be 1-D with equal length, got {ue.shape} and {bs.shape}")
    return ThetaCoefficients(values=theta_rows(ue + bs))


def true_cpe(ue_trace: np.ndarray, bs_traces: np.ndarray, window_start: int,
             n_subcarriers: int) -> np.ndarray:
    """Realized CPE coefficient(s) theta_{i,0} for the given symbol window.

    Returns shape (1,) when the BS trace is shared, (M,) for per-antenna
    traces.
    """
    ue = np.asarray(ue_trace)
    bs = np.atleast_2d(np.asarray(bs_traces))
    lo, hi = window_start, window_start + n_subcarriers
    psi = ue[lo:hi][None, :] + bs[:, lo:hi]
    return theta_rows(psi)[:, 0]


def ar1_rho(sigma_phi_ue_var: float, sigma_phi_bs_var: float) -> float:
    """AR(1) coefficient of the CPE across consecutive OFDM symbols.

    rho = exp(-(sigma_bs^2 + sigma_ue^2) / 2); equals 1 iff both variances
    are zero.
    """
    if sigma_phi_ue_var < 0 or sigma_phi_bs_var < 0:
        raise ValueError("phase increment variances must be nonnegative")
    return float(np.exp(-(sigma_phi_ue_var + sigma_phi_bs_var) / 2.0))


def mean_cpe_magnitude(n_subcarriers: int, total_increment_var: float) -> float:
    """|E[theta_0]| for a fresh symbol starting at phase 0.

    The phase at sample k has variance k*sigma^2, so
    E[theta_0] = (1/Nc) * sum_k exp(-k*sigma^2/2).
    """
    k = np.arange(n_subcarriers)
    return float(np.mean(np.exp(-k * total_increment_var / 2.0)))
