"""Massive MIMO-OFDM uplink with oscillator phase noise.

Link-level simulator and analytic toolkit: Wiener phase noise at the UE and
BS oscillators (common or distributed), MRC detection with an exact
SIG/ICI/AWGN split, semi-analytic instantaneous SNR and ergodic capacity,
and Kalman tracking of the common phase error against channel aging.
"""

from .config import SystemConfig, validate, load_config
from .phase_noise import (PhaseTrace, ThetaCoefficients, ar1_rho,
                          generate_trace, theta_coefficients)
from .channel import ChannelRealization, ChannelEstimate, generate_channel, pilot_estimate
from .link import ReceivedFrame, SnrBreakdown, mrc_detect, synthesize_frame, theta_matrix_oracle
from .analytic import (AsymptoticSnr, CapacityEstimate, PnTerms, asymptotic_snr,
                       ergodic_capacity, ici_variance, pn_terms, pn_terms_literal)
from .kalman import KalmanState, compensate, compensation_factor
from .experiments import CapacityCurve, CurvePoint, emit, run_analytic_overlay, run_sweep

__version__ = "0.1.0"

__all__ = [
    "SystemConfig", "validate", "load_config",
    "PhaseTrace", "ThetaCoefficients", "ar1_rho", "generate_trace", "theta_coefficients",
    "ChannelRealization", "ChannelEstimate", "generate_channel", "pilot_estimate",
    "ReceivedFrame", "SnrBreakdown", "mrc_detect", "synthesize_frame", "theta_matrix_oracle",
    "AsymptoticSnr", "CapacityEstimate", "PnTerms", "asymptotic_snr",
    "ergodic_capacity", "ici_variance", "pn_terms", "pn_terms_literal",
    "KalmanState", "compensate", "compensation_factor",
    "CapacityCurve", "CurvePoint", "emit", "run_analytic_overlay", "run_sweep",
]
