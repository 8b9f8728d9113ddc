"""Semi-analytic SNR: phase-noise terms, ICI variance, capacity.

The post-MRC powers on a subcarrier reduce, for many antennas, to five
scalar phase-noise terms evaluated per UE phase realization:

  pn1  desired-power diagonal term, E|theta_0,0|^2 |theta_D,0|^2
  pn2  desired-power cross-antenna term, |E theta_0,0^* theta_D,0|^2
  pn3  ICI power term, E|theta_0,0|^2 (1 - |theta_D,0|^2)
  pn4  pilot CPE power weighting the data AWGN, E|theta_0,0|^2
  pn5  total data-symbol power seen by the estimate's contamination (= 1)

with the expectation over the BS oscillators only: realized in the
common-oscillator (CO) case, closed-form exponential kernels of the
increment variance in the distributed-oscillator (DO) case. Each term is a
quadratic or sesquilinear form of O(Nc^2) cost; a literal nested-index
summation oracle is retained for small Nc.

The finite-antenna instantaneous SNR combines the five terms with the AWGN
variance and the unit-power ICI variance; its large-M behaviour splits into
three regimes by the power-scaling exponent alpha.
"""

from dataclasses import dataclass
import numpy as np

from .rng import ROLE_ICI_VAR, complex_normal, stream
from .phase_noise import theta_rows

REGIME_VANISHING = "vanishing"   # alpha > 1/2: SNR -> 0
REGIME_FINITE = "finite"         # alpha = 1/2: SNR -> pn2 / sigma_w^4
REGIME_UNBOUNDED = "unbounded"   # alpha < 1/2: SNR -> inf


@dataclass
class PnTerms:
    pn1: float
    pn2: float
    pn3: float
    pn4: float
    pn5: float
    scenario: str


@dataclass
class AsymptoticSnr:
    snr: float
    regime: str
    sigma_ici_sq: float


@dataclass
class CapacityEstimate:
    c_erg: float     # bits/s/Hz per subcarrier
    std_err: float


def _samples(trace):
    return trace.samples if hasattr(trace, "samples") else np.asarray(trace)


def _abs_diff_kernel(n_sc: int, bs_var: float, offset: int = 0) -> np.ndarray:
    """K[a, b] = exp(-bs_var * |offset + b - a| / 2)."""
    idx = np.arange(n_sc)
    return np.exp(-bs_var / 2.0 * np.abs(offset + idx[None, :] - idx[:, None]))


def pn_terms_from_windows(ue0: np.ndarray, ue_d: np.ndarray, bs0, bs_d,
                          bs_var: float, delay: int, scenario: str) -> PnTerms:
    """Factorized evaluation from the training and data phase windows."""
    n_sc = len(ue0)
    if scenario == "CO":
        if bs0 is None or bs_d is None:
            raise ValueError("CO phase-noise terms need the realized BS windows")
        q0 = abs(theta_rows(np.asarray(ue0) + np.asarray(bs0))[0]) ** 2
        qd = abs(theta_rows(np.asarray(ue_d) + np.asarray(bs_d))[0]) ** 2
        pn1 = q0 * qd
        pn2 = pn1
        pn3 = q0 * (1.0 - qd)
        pn4 = q0
    elif scenario == "DO":
        u0 = np.exp(1j * np.asarray(ue0))
        ud = np.exp(1j * np.asarray(ue_d))
        kern = _abs_diff_kernel(n_sc, bs_var)
        a0 = float(np.real(np.conj(u0) @ kern @ u0)) / n_sc**2
        ad = float(np.real(np.conj(ud) @ kern @ ud)) / n_sc**2
        bridge = _abs_diff_kernel(n_sc, bs_var, offset=delay)
        b = (np.conj(u0) @ bridge @ ud) / n_sc**2
        pn1 = a0 * ad
        pn2 = float(abs(b) ** 2)
        pn3 = a0 * (1.0 - ad)
        pn4 = a0
    else:
        raise ValueError(f"unknown scenario {scenario!r}")
    return PnTerms(pn1=float(pn1), pn2=float(pn2), pn3=float(pn3),
                   pn4=float(pn4), pn5=1.0, scenario=scenario)


def pn_terms(ue_trace, bs_trace, config) -> PnTerms:
    """Phase-noise terms for the training window [0, Nc) and data window
    [D, D + Nc) of the given traces.

    bs_trace is required (and realized) in CO; ignored in DO where the BS
    average is closed-form.
    """
    ue = _samples(ue_trace)
    n_sc, delay = config.n_subcarriers, config.delay_samples
    if len(ue) < delay + n_sc:
        raise ValueError(f"UE trace covers {len(ue)} samples, need {delay + n_sc}")
    bs0 = bs_d = None
    if config.scenario == "CO":
        bs = _samples(bs_trace)
        if len(bs) < delay + n_sc:
            raise ValueError(f"BS trace covers {len(bs)} samples, need {delay + n_sc}")
        bs0, bs_d = bs[:n_sc], bs[delay:delay + n_sc]
    return pn_terms_from_windows(ue[:n_sc], ue[delay:delay + n_sc], bs0, bs_d,
                                 config.sigma_phi_bs_rad**2, delay, config.scenario)


def pn_terms_literal(ue_trace, bs_trace, config) -> PnTerms:
    """Literal nested-index summation of each term's defining expression.

    Materializes every (n1, n2, n3, n4) quadruple for the desired-power and
    ICI terms; O(Nc^4) memory and time, oracle use only.
    """
    n_sc, delay = config.n_subcarriers, config.delay_samples
    if n_sc > 24:
        raise ValueError(f"literal summation is capped at Nc <= 24, got {n_sc}")
    scenario = config.scenario
    bs_var = config.sigma_phi_bs_rad**2
    ue = _samples(ue_trace)
    e0 = np.exp(1j * ue[:n_sc])
    ed = np.exp(1j * ue[delay:delay + n_sc])

    # UE factor exp(j(phi_{D+n2} - phi_{D+n4} + phi_{n3} - phi_{n1})),
    # axes ordered (n1, n2, n3, n4).
    ue4 = (np.conj(e0)[:, None, None, None] * ed[None, :, None, None]
           * e0[None, None, :, None] * np.conj(ed)[None, None, None, :])

    if scenario == "CO":
        bs = _samples(bs_trace)
        b0 = np.exp(1j * bs[:n_sc])
        bd = np.exp(1j * bs[delay:delay + n_sc])
        kern1 = (np.conj(b0)[:, None, None, None] * bd[None, :, None, None]
                 * b0[None, None, :, None] * np.conj(bd)[None, None, None, :])
        kern4 = b0[None, :] * np.conj(b0)[:, None]          # (n1, n2)
        kern5 = bd[None, :] * np.conj(bd)[:, None]
    elif scenario == "DO":
        k24 = _abs_diff_kernel(n_sc, bs_var)                 # exp(-v|n4-n2|/2) etc.
        k13 = _abs_diff_kernel(n_sc, bs_var)
        kern1 = k13[:, None, :, None] * k24[None, :, None, :]
        kern4 = _abs_diff_kernel(n_sc, bs_var)
        kern5 = _abs_diff_kernel(n_sc, bs_var)
    else:
        raise ValueError(f"unknown scenario {scenario!r}")

    pn1 = np.sum(ue4 * kern1).real / n_sc**4

    if scenario == "CO":
        pn2 = pn1
    else:
        k21 = _abs_diff_kernel(n_sc, bs_var, offset=delay)   # exp(-v|D+n2-n1|/2), also |D+n4-n3|
        kern2 = k21[:, :, None, None] * k21[None, None, :, :]
        pn2 = np.sum(ue4 * kern2).real / n_sc**4

    # ICI orthogonality factor: sum over the nonzero subcarrier offsets.
    nt = np.arange(1, n_sc)
    idx = np.arange(n_sc)
    s24 = np.sum(np.exp(2j * np.pi * (idx[:, None, None] - idx[None, :, None]) * nt[None, None, :] / n_sc), axis=2)
    pn3 = np.sum(ue4 * kern1 * s24[None, :, None, :]).real / n_sc**4

    ue2 = e0[None, :] * np.conj(e0)[:, None]                 # exp(j(phi_{n2} - phi_{n1}))
    pn4 = np.sum(ue2 * kern4).real / n_sc**2

    nt_full = np.arange(n_sc)
    s_full = np.sum(np.exp(2j * np.pi * (idx[None, :, None] - idx[:, None, None]) * nt_full[None, None, :] / n_sc), axis=2)
    ue2d = ed[None, :] * np.conj(ed)[:, None]                # exp(j(phi_{D+n2} - phi_{D+n1}))
    pn5 = np.sum(ue2d * kern5 * s_full).real / n_sc**2

    return PnTerms(pn1=float(pn1), pn2=float(pn2), pn3=float(pn3),
                   pn4=float(pn4), pn5=float(pn5), scenario=scenario)


DEFAULT_ICI_TRIALS = 200_000
_ICI_CACHE: dict = {}


def ici_variance(config, trials: int = DEFAULT_ICI_TRIALS) -> float:
    """Unit-power ICI variance on a subcarrier, by Monte Carlo.

    Synthesizes the ICI term of the single-subcarrier model (phase-noise
    leakage of the other Nc - 1 subcarriers through the channel and BPSK
    symbols) and returns its empirical power. Seeded from the config, cached
    per parameter set. Scenario-independent: the per-antenna marginal law of
    the coefficients is the same for CO and DO.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    key = (config.n_subcarriers, config.sigma_phi_ue_rad, config.sigma_phi_bs_rad,
           trials, config.seed)
    if key in _ICI_CACHE:
        return _ICI_CACHE[key]

    n_sc = config.n_subcarriers
    rng = stream(config.seed, ROLE_ICI_VAR)
    total = 0.0
    done = 0
    chunk = 20_000
    while done < trials:
        n = min(chunk, trials - done)
        ue = np.cumsum(config.sigma_phi_ue_rad * rng.standard_normal((n, n_sc)), axis=1)
        bs = np.cumsum(config.sigma_phi_bs_rad * rng.standard_normal((n, n_sc)), axis=1)
        theta = theta_rows(ue + bs)
        g = complex_normal(rng, (n, n_sc), var=1.0)
        c = rng.integers(0, 2, size=(n, n_sc)) * 2 - 1
        ici = np.sum(theta[:, 1:] * g[:, 1:] * c[:, 1:], axis=1)
        total += float(np.sum(np.abs(ici) ** 2))
        done += n
    value = total / trials
    _ICI_CACHE[key] = value
    return value


def snr_ratio(pn1, pn2, pn3, pn4, pn5, sigma_ici_sq, n_antennas, alpha, noise_var):
    """Finite-M instantaneous SNR ratio; accepts scalars or arrays.

    Numerator: desired power, diagonal plus cross-antenna terms.
    Denominator: ICI power, three AWGN-bearing terms (pilot-CPE weighted
    noise, noise-against-noise, contamination against the data signal) and
    the ICI contamination of the estimate, all kept at finite M.
    """
    m = float(n_antennas)
    nv = noise_var
    num = 2.0 * pn1 / m ** (2 * alpha - 1) + pn2 / m ** (2 * alpha - 2)
    den = (pn3 / m ** (2 * alpha - 1)
           + pn4 * nv / m ** (alpha - 1)
           + m * nv**2
           + sigma_ici_sq * nv / m ** (alpha - 1)
           + nv * pn5 / m ** (alpha - 1)
           + sigma_ici_sq * pn5 / m ** (2 * alpha - 1))
    return num / den


def asymptotic_snr(pn: PnTerms, sigma_ici_sq: float, config,
                   n_antennas: int | None = None) -> AsymptoticSnr:
    """Finite-M instantaneous SNR from the phase-noise terms.

    All numerator and denominator terms are kept (no large-M truncation);
    the regime label describes the M -> infinity limit for the configured
    alpha.
    """
    if config.noise_var <= 0:
        raise ValueError("instantaneous SNR is undefined for noise_var = 0")
    m = n_antennas if n_antennas is not None else config.n_antennas
    alpha = config.alpha
    snr = snr_ratio(pn.pn1, pn.pn2, pn.pn3, pn.pn4, pn.pn5,
                    sigma_ici_sq, m, alpha, config.noise_var)

    if alpha > 0.5:
        regime = REGIME_VANISHING
    elif alpha == 0.5:
        regime = REGIME_FINITE
    else:
        regime = REGIME_UNBOUNDED
    return AsymptoticSnr(snr=float(snr), regime=regime, sigma_ici_sq=float(sigma_ici_sq))


def ergodic_capacity(snr_samples) -> CapacityEstimate:
    """Mean of log2(1 + snr) and its Monte Carlo standard error."""
    snr = np.asarray(snr_samples, dtype=float)
    if snr.size == 0:
        raise ValueError("capacity needs at least one SNR sample")
    if np.any(snr < 0):
        raise ValueError("SNR samples must be nonnegative")
    caps = np.log2(1.0 + snr)
    mean = float(np.mean(caps))
    std_err = float(np.std(caps, ddof=1) / np.sqrt(snr.size)) if snr.size > 1 else 0.0
    return CapacityEstimate(c_erg=mean, std_err=std_err)
