"""Frequency-selective Rayleigh channel and the pilot-based estimate."""

from dataclasses import dataclass
import numpy as np

from .rng import complex_normal


@dataclass
class ChannelRealization:
    """M x Nc frequency-domain channel, i.i.d. CN(0, 1) entries.

    Constant within a trial: the elapsed time between training and data is
    assumed shorter than the coherence time, so the data symbol sees the
    same matrix.
    """
    g: np.ndarray


@dataclass
class ChannelEstimate:
    """Per-subcarrier pilot-based estimates, M x Nc."""
    g_hat: np.ndarray


def generate_channel(n_antennas: int, n_subcarriers: int, rng) -> ChannelRealization:
    if n_antennas < 1 or n_subcarriers < 1:
        raise ValueError(f"invalid channel dimensions {n_antennas} x {n_subcarriers}")
    return ChannelRealization(g=complex_normal(rng, (n_antennas, n_subcarriers), var=1.0))


def pilot_estimate(pilot_frame) -> ChannelEstimate:
    """g_hat[:, n] = y[:, n] of the all-ones pilot symbol.

    This is the (scaled) ML estimate of the CPE-rotated channel per
    subcarrier; the estimate keeps the received scaling, so downstream
    formulas carry the sqrt(P) factor explicitly.
    """
    if pilot_frame.role != "pilot":
        raise ValueError(f"channel estimation needs a pilot frame, got role={pilot_frame.role!r}")
    return ChannelEstimate(g_hat=pilot_frame.y.copy())
