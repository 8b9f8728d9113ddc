"""Monte Carlo harness: capacity curves over a P/sigma_w^2 sweep.

Each grid point fixes the AWGN variance from the configured transmit power
and runs independent end-to-end trials: pilot, gap (or extended training
with CPE tracking), data symbol, MRC, instantaneous SNR, log2(1 + SNR).
Results are deterministic functions of (seed, config, grid): every trial
draws from streams keyed by (seed, point, trial, role), and aggregation
happens on trial-ordered arrays, so serial and worker-pool execution
produce identical bytes.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, asdict, replace
import json
import os

import numpy as np

from . import kalman, rng as rngmod
from .analytic import (asymptotic_snr, ergodic_capacity, ici_variance,
                       pn_terms_from_windows, snr_ratio)
from .channel import generate_channel, pilot_estimate
from .config import SystemConfig, validate
from .kalman import compensation_factor, extension_power
from .link import mrc_detect, synthesize_frame
from .phase_noise import generate_trace_batch
from .rng import stream

WORKERS_ENV = "MIMOPN_WORKERS"


@dataclass
class CurvePoint:
    p_over_sigma_db: float
    c_erg: float
    std_err: float


@dataclass
class CapacityCurve:
    points: list
    scenario: str
    compensation: str
    config: SystemConfig
    seed: int
    kind: str = "simulation"   # "simulation" | "analytic"


def _point_config(config: SystemConfig, db: float) -> SystemConfig:
    """Config for one grid point: sigma_w^2 set so P/sigma_w^2 hits db."""
    return replace(config, noise_var=config.power / 10.0 ** (db / 10.0))


@dataclass
class TrialResult:
    breakdown: object          # SnrBreakdown of the data symbol
    ue: np.ndarray             # UE phase trace
    bs: np.ndarray             # BS trace(s): (length,) in CO, (M, length) in DO
    g: np.ndarray              # channel matrix
    theta_hat_final: np.ndarray | None = None     # filter estimate used at data time
    theta_hat_training: np.ndarray | None = None  # filter estimate after the pilot

    @property
    def snr_inst(self) -> float:
        return self.breakdown.snr_inst


def run_trial(cfg: SystemConfig, point_idx: int, trial_idx: int, ici_var: float) -> TrialResult:
    """One end-to-end realization: pilot, gap or extended training, data
    symbol, MRC with the exact term split."""
    seed = cfg.seed
    n_ant, n_sc, delay = cfg.n_antennas, cfg.n_subcarriers, cfg.delay_samples
    length = cfg.trace_length

    ue = generate_trace_batch(1, length, cfg.sigma_phi_ue_rad,
                              stream(seed, point_idx, trial_idx, rngmod.ROLE_UE_TRACE))[0]
    bs_rng = stream(seed, point_idx, trial_idx, rngmod.ROLE_BS_TRACE)
    if cfg.scenario == "CO":
        bs = generate_trace_batch(1, length, cfg.sigma_phi_bs_rad, bs_rng)[0]
    else:
        bs = generate_trace_batch(n_ant, length, cfg.sigma_phi_bs_rad, bs_rng)

    g = generate_channel(n_ant, n_sc, stream(seed, point_idx, trial_idx, rngmod.ROLE_CHANNEL)).g
    ones = np.ones(n_sc)
    pilot = synthesize_frame(g, ue, bs, ones, 0, cfg.power, cfg.noise_var,
                             stream(seed, point_idx, trial_idx, rngmod.ROLE_PILOT_NOISE),
                             role="pilot")
    g_hat = pilot_estimate(pilot)

    comp = None
    theta_final = theta_train = None
    if cfg.compensation == "kalman":
        state = kalman.init(cfg, ici_var)
        state = kalman.step(state, pilot, g[:, 0], cfg, ici_var)
        theta_train = state.theta_hat.copy()
        ext_rng = stream(seed, point_idx, trial_idx, rngmod.ROLE_EXT_NOISE)
        p_ext = extension_power(cfg)
        for sym in range(1, cfg.n_symbols_delay):
            ext = synthesize_frame(g, ue, bs, ones, sym * n_sc, p_ext, cfg.noise_var,
                                   ext_rng, role="training-extension")
            state = kalman.step(state, ext, g[:, 0], cfg, ici_var)
        theta_final = state.theta_hat
        comp = compensation_factor(theta_final, theta_train, cfg.compensation_mode)

    symbols = stream(seed, point_idx, trial_idx, rngmod.ROLE_DATA_SYMBOLS).integers(0, 2, n_sc) * 2 - 1
    data = synthesize_frame(g, ue, bs, symbols.astype(float), delay, cfg.power, cfg.noise_var,
                            stream(seed, point_idx, trial_idx, rngmod.ROLE_DATA_NOISE),
                            role="data")

    g_col = g_hat.g_hat[:, 0]
    if comp is not None:
        g_col = (comp[0] if comp.shape[0] == 1 else comp) * g_col
    breakdown = mrc_detect(g_col, data, pilot, compensation=comp)
    return TrialResult(breakdown=breakdown, ue=ue, bs=bs, g=g,
                       theta_hat_final=theta_final, theta_hat_training=theta_train)


def simulate_trial(cfg: SystemConfig, point_idx: int, trial_idx: int, ici_var: float) -> float:
    """One end-to-end realization; returns the instantaneous SNR."""
    return run_trial(cfg, point_idx, trial_idx, ici_var).snr_inst


def _trial_chunk(args):
    cfg, point_idx, lo, hi, ici_var = args
    return [simulate_trial(cfg, point_idx, t, ici_var) for t in range(lo, hi)]


def _resolve_workers(workers) -> int:
    if workers is not None:
        return max(1, int(workers))
    env = os.environ.get(WORKERS_ENV)
    return max(1, int(env)) if env else 1


def _point_snrs(cfg: SystemConfig, point_idx: int, ici_var: float, workers: int) -> np.ndarray:
    trials = cfg.trials
    if workers == 1:
        samples = _trial_chunk((cfg, point_idx, 0, trials, ici_var))
        return np.asarray(samples)
    chunk = max(1, -(-trials // (workers * 4)))
    bounds = [(lo, min(lo + chunk, trials)) for lo in range(0, trials, chunk)]
    out = np.empty(trials)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        jobs = [(cfg, point_idx, lo, hi, ici_var) for lo, hi in bounds]
        for (lo, hi), res in zip(bounds, pool.map(_trial_chunk, jobs)):
            out[lo:hi] = res
    return out


def _check_grid(db_grid) -> list:
    grid = [float(db) for db in db_grid]
    if not grid:
        raise ValueError("sweep grid is empty")
    if len(set(grid)) != len(grid):
        raise ValueError(f"sweep grid has duplicate points: {sorted(grid)}")
    return sorted(grid)


def run_sweep(config: SystemConfig, db_grid, workers=None) -> CapacityCurve:
    """Fig.-1-style capacity curve: one point per P/sigma_w^2 value."""
    cfg = validate(config)
    grid = _check_grid(db_grid)
    n_workers = _resolve_workers(workers)
    ici_var = ici_variance(cfg)
    points = []
    for idx, db in enumerate(grid):
        pcfg = _point_config(cfg, db)
        snrs = _point_snrs(pcfg, idx, ici_var, n_workers)
        cap = ergodic_capacity(snrs)
        points.append(CurvePoint(p_over_sigma_db=db, c_erg=cap.c_erg, std_err=cap.std_err))
    return CapacityCurve(points=points, scenario=cfg.scenario, compensation=cfg.compensation,
                         config=cfg, seed=cfg.seed, kind="simulation")


def _window_pairs(rng, n, n_sc, delay, std):
    """Batch of (training window, data window) phase paths, bridged over
    the gap without materializing it."""
    w0 = np.zeros((n, n_sc))
    if std > 0:
        np.cumsum(std * rng.standard_normal((n, n_sc - 1)), axis=1, out=w0[:, 1:])
    if delay == 0:
        return w0, w0
    wd = np.zeros((n, n_sc))
    if std > 0:
        jump = std * np.sqrt(delay - n_sc + 1) * rng.standard_normal((n, 1))
        wd[:, 0:1] = w0[:, -1:] + jump
        np.cumsum(std * rng.standard_normal((n, n_sc - 1)), axis=1, out=wd[:, 1:])
        wd[:, 1:] += wd[:, 0:1]
    return w0, wd


def run_analytic_overlay(config: SystemConfig, db_grid) -> CapacityCurve:
    """Capacity from the phase-noise-term SNR instead of link simulation.

    Fresh UE (and, in CO, BS) phase realizations per sample; the channel,
    AWGN and data symbols are already averaged inside the SNR expression.
    """
    cfg = validate(config)
    grid = _check_grid(db_grid)
    ici_var = ici_variance(cfg)
    n_sc, delay, trials = cfg.n_subcarriers, cfg.delay_samples, cfg.trials
    bs_var = cfg.sigma_phi_bs_rad**2

    points = []
    for idx, db in enumerate(grid):
        pcfg = _point_config(cfg, db)
        ue0, ued = _window_pairs(stream(cfg.seed, idx, rngmod.ROLE_ANALYTIC_UE),
                                 trials, n_sc, delay, cfg.sigma_phi_ue_rad)
        bs0 = bsd = None
        if cfg.scenario == "CO":
            bs0, bsd = _window_pairs(stream(cfg.seed, idx, rngmod.ROLE_ANALYTIC_BS),
                                     trials, n_sc, delay, cfg.sigma_phi_bs_rad)
        snrs = np.empty(trials)
        for k in range(trials):
            if cfg.scenario == "CO":
                pn = pn_terms_from_windows(ue0[k], ued[k], bs0[k], bsd[k], bs_var, delay, "CO")
            else:
                pn = pn_terms_from_windows(ue0[k], ued[k], None, None, bs_var, delay, "DO")
            snrs[k] = snr_ratio(pn.pn1, pn.pn2, pn.pn3, pn.pn4, pn.pn5, ici_var,
                                pcfg.n_antennas, pcfg.alpha, pcfg.noise_var)
        cap = ergodic_capacity(snrs)
        points.append(CurvePoint(p_over_sigma_db=db, c_erg=cap.c_erg, std_err=cap.std_err))
    return CapacityCurve(points=points, scenario=cfg.scenario, compensation=cfg.compensation,
                         config=cfg, seed=cfg.seed, kind="analytic")


def emit(curve: CapacityCurve, path, fmt: str = "csv") -> None:
    """Write a curve as CSV (delimited points) or JSON (points plus the
    config echo and seed). Byte-identical across reruns with the same
    seed/config/grid."""
    if fmt not in ("csv", "json"):
        raise ValueError(f"format must be 'csv' or 'json', got {fmt!r}")
    if not curve.points:
        raise ValueError("refusing to emit an empty curve")
    if fmt == "csv":
        lines = ["db,c_erg,std_err,scenario,compensation"]
        for p in curve.points:
            lines.append(f"{p.p_over_sigma_db!r},{p.c_erg!r},{p.std_err!r},"
                         f"{curve.scenario},{curve.compensation}")
        payload = "\n".join(lines) + "\n"
    else:
        doc = {
            "kind": curve.kind,
            "scenario": curve.scenario,
            "compensation": curve.compensation,
            "seed": curve.seed,
            "config": asdict(curve.config),
            "points": [
                {"db": p.p_over_sigma_db, "c_erg": p.c_erg, "std_err": p.std_err}
                for p in curve.points
            ],
        }
        payload = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(payload)
    except OSError as exc:
        raise RuntimeError(f"cannot write {path}: {exc}") from exc


def load_curve_points(path):
    """Read back (db, c_erg, std_err) rows plus labels from an emitted file."""
    text = open(path, "r", encoding="utf-8").read()
    if str(path).endswith(".json") or text.lstrip().startswith("{"):
        doc = json.loads(text)
        pts = [(p["db"], p["c_erg"], p["std_err"]) for p in doc["points"]]
        return pts, doc["scenario"], doc["compensation"], doc.get("kind", "simulation")
    lines = [ln for ln in text.splitlines() if ln.strip()]
    pts, scenario, compensation = [], "", ""
    for ln in lines[1:]:
        db, c, se, scenario, compensation = ln.split(",")
        pts.append((float(db), float(c), float(se)))
    return pts, scenario, compensation, "simulation"
