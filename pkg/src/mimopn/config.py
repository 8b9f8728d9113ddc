"""Experiment configuration and validation.

Unit conventions used throughout the package:
  - phase-noise increment standard deviations are entered in degrees and
    stored in radians (fields *_rad),
  - per-subcarrier transmit power is derived as P = M**(-alpha),
  - the pilot OFDM symbol occupies time samples [0, Nc), the data symbol
    occupies [D, D + Nc); D counts time instants from the start of training
    to the start of data and must be a whole number of OFDM symbols.
"""

from dataclasses import dataclass, replace
import math

SCENARIOS = ("CO", "DO")
COMPENSATIONS = ("none", "kalman")
KALMAN_Q_MODES = ("paper", "unit")
COMPENSATION_MODES = ("relative", "absolute")

DEG2RAD = math.pi / 180.0


@dataclass(frozen=True)
class SystemConfig:
    n_subcarriers: int = 64      # Nc, subcarriers per OFDM symbol
    n_antennas: int = 100        # M, BS antennas
    alpha: float = 0.5           # power-scaling exponent, P = M**(-alpha)
    sigma_phi_ue_deg: float = 2.0  # UE phase increment std [deg]
    sigma_phi_bs_deg: float = 2.0  # per-BS-oscillator increment std [deg]
    delay_samples: int = 1280    # D, start-of-training to start-of-data
    noise_var: float = 0.01      # AWGN variance per subcarrier per antenna
    scenario: str = "CO"         # "CO" | "DO"
    compensation: str = "none"   # "none" | "kalman"
    trials: int = 2000           # Monte Carlo realizations per point
    seed: int = 1                # master RNG seed (64-bit unsigned)
    symbol_duration: float | None = None  # T_s [s], metadata only
    kalman_q_mode: str = "paper"          # "paper": q=Nc(1-rho^2); "unit": q=1-rho^2
    compensation_mode: str = "relative"   # "relative" | "absolute" CPE rotation

    # Derived fields, filled in by validate().
    sigma_phi_ue_rad: float = 0.0
    sigma_phi_bs_rad: float = 0.0
    power: float = 0.0

    @property
    def n_symbols_delay(self) -> int:
        """D / Nc, OFDM-symbol periods between training start and data start."""
        return self.delay_samples // self.n_subcarriers

    @property
    def trace_length(self) -> int:
        """Time samples a phase trace must cover: training, gap and data."""
        return self.delay_samples + self.n_subcarriers


def validate(config: SystemConfig) -> SystemConfig:
    """Check invariants and return a normalized copy (radians and P filled).

    Idempotent: validating an already-validated config is a no-op.
    """
    c = config
    if c.n_subcarriers <= 0:
        raise ValueError(f"n_subcarriers must be positive, got {c.n_subcarriers}")
    if c.n_antennas <= 0:
        raise ValueError(f"n_antennas must be positive, got {c.n_antennas}")
    if c.alpha < 0:
        raise ValueError(f"alpha must be nonnegative, got {c.alpha}")
    if c.sigma_phi_ue_deg < 0 or c.sigma_phi_bs_deg < 0:
        raise ValueError("phase-noise increment std must be nonnegative")
    if c.delay_samples < 0:
        raise ValueError(f"delay_samples must be nonnegative, got {c.delay_samples}")
    if c.delay_samples % c.n_subcarriers != 0:
        raise ValueError(
            f"delay_samples (D={c.delay_samples}) must be a multiple of "
            f"n_subcarriers (Nc={c.n_subcarriers})"
        )
    if c.noise_var <= 0:
        raise ValueError(f"noise_var must be positive, got {c.noise_var}")
    if c.scenario not in SCENARIOS:
        raise ValueError(f"scenario must be one of {SCENARIOS}, got {c.scenario!r}")
    if c.compensation not in COMPENSATIONS:
        raise ValueError(f"compensation must be one of {COMPENSATIONS}, got {c.compensation!r}")
    if c.compensation == "kalman" and c.delay_samples == 0:
        raise ValueError("kalman compensation needs a training extension (delay_samples > 0)")
    if c.kalman_q_mode not in KALMAN_Q_MODES:
        raise ValueError(f"kalman_q_mode must be one of {KALMAN_Q_MODES}, got {c.kalman_q_mode!r}")
    if c.compensation_mode not in COMPENSATION_MODES:
        raise ValueError(
            f"compensation_mode must be one of {COMPENSATION_MODES}, got {c.compensation_mode!r}"
        )
    if c.trials <= 0:
        raise ValueError(f"trials must be positive, got {c.trials}")
    if not (0 <= c.seed < 2**64):
        raise ValueError(f"seed must fit in 64 bits, got {c.seed}")
    if c.symbol_duration is not None and c.symbol_duration <= 0:
        raise ValueError(f"symbol_duration must be positive when set, got {c.symbol_duration}")

    power = float(c.n_antennas) ** (-float(c.alpha))
    return replace(
        c,
        sigma_phi_ue_rad=c.sigma_phi_ue_deg * DEG2RAD,
        sigma_phi_bs_rad=c.sigma_phi_bs_deg * DEG2RAD,
        power=power,
    )


# Fields settable from a config file or CLI flags, with their parsers.
_FIELD_PARSERS = {
    "n_subcarriers": int,
    "n_antennas": int,
    "alpha": float,
    "sigma_phi_ue_deg": float,
    "sigma_phi_bs_deg": float,
    "delay_samples": int,
    "noise_var": float,
    "scenario": str,
    "compensation": str,
    "trials": int,
    "seed": int,
    "symbol_duration": float,
    "kalman_q_mode": str,
    "compensation_mode": str,
}


def parse_config_text(text: str) -> dict:
    """Parse flat `key = value` lines; '#' starts a comment."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key not in _FIELD_PARSERS:
            raise ValueError(f"line {lineno}: unknown config key {key!r}")
        try:
            values[key] = _FIELD_PARSERS[key](val)
        except ValueError as exc:
            raise ValueError(f"line {lineno}: bad value for {key!r}: {val!r}") from exc
    return values


def load_config(path, overrides: dict | None = None) -> SystemConfig:
    """Build a validated SystemConfig from a key/value file plus overrides."""
    with open(path, "r", encoding="utf-8") as fh:
        values = parse_config_text(fh.read())
    if overrides:
        values.update(overrides)
    return validate(SystemConfig(**values))
