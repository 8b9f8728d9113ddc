"""Command-line interface.

Subcommands: `sweep` (Monte Carlo capacity curve), `analytic` (overlay
curve from the phase-noise-term SNR), `ici-var` (print the unit-power ICI
variance for a config), `selftest` (oracle-equivalence checks) and `plot`
(render emitted curves to a figure). Every config field is settable either
in a flat key=value config file (--config) or by a flag of the same name.
"""

import argparse
import os
import sys

from .analytic import DEFAULT_ICI_TRIALS, ici_variance
from .config import SystemConfig, _FIELD_PARSERS, load_config, validate
from .experiments import WORKERS_ENV, emit, run_analytic_overlay, run_sweep

DEFAULT_GRID = "-10:30:5"


def parse_grid(text: str):
    """Grid spec: comma-separated dB values, or lo:hi:step (inclusive)."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"grid range must be lo:hi:step, got {text!r}")
        lo, hi, step = (float(p) for p in parts)
        if step <= 0 or hi < lo:
            raise ValueError(f"bad grid range {text!r}")
        grid = []
        v = lo
        while v <= hi + 1e-9:
            grid.append(round(v, 9))
            v += step
        return grid
    return [float(p) for p in text.split(",") if p.strip()]


def _add_config_flags(parser):
    group = parser.add_argument_group("model configuration")
    group.add_argument("--config", metavar="FILE", help="flat key=value config file")
    for name, parse in _FIELD_PARSERS.items():
        group.add_argument(f"--{name}", type=parse, default=None)


def _build_config(args) -> SystemConfig:
    overrides = {name: getattr(args, name) for name in _FIELD_PARSERS
                 if getattr(args, name, None) is not None}
    if args.config:
        return load_config(args.config, overrides)
    return validate(SystemConfig(**overrides))


def _emit_and_plot(curve, args):
    emit(curve, args.out, args.format)
    print(f"wrote {args.out}")
    if args.plot:
        from .report import plot_curves
        fig_path = os.path.splitext(args.out)[0] + ".png"
        plot_curves([curve], fig_path)
        print(f"wrote {fig_path}")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="mimopn",
        description="Massive MIMO-OFDM uplink with oscillator phase noise: "
                    "capacity sweeps, semi-analytic SNR and Kalman CPE tracking.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sweep = sub.add_parser("sweep", help="Monte Carlo capacity curve over P/sigma_w^2")
    _add_config_flags(p_sweep)
    p_sweep.add_argument("--grid", default=DEFAULT_GRID,
                         help="dB grid, 'lo:hi:step' or comma list (default %(default)s)")
    p_sweep.add_argument("--out", required=True, help="output file path")
    p_sweep.add_argument("--format", choices=("csv", "json"), default="csv")
    p_sweep.add_argument("--plot", action="store_true",
                         help="also render the curve to <out>.png")
    p_sweep.add_argument("--workers", type=int, default=None,
                         help=f"trial worker processes (or set {WORKERS_ENV})")

    p_ana = sub.add_parser("analytic", help="overlay curve from the semi-analytic SNR")
    _add_config_flags(p_ana)
    p_ana.add_argument("--grid", default=DEFAULT_GRID)
    p_ana.add_argument("--out", required=True)
    p_ana.add_argument("--format", choices=("csv", "json"), default="csv")
    p_ana.add_argument("--plot", action="store_true")

    p_ici = sub.add_parser("ici-var", help="print the unit-power ICI variance")
    _add_config_flags(p_ici)
    p_ici.add_argument("--ici-trials", type=int, default=DEFAULT_ICI_TRIALS)

    sub.add_parser("selftest", help="run the oracle-equivalence checks")

    p_plot = sub.add_parser("plot", help="render emitted curve files to one figure")
    p_plot.add_argument("files", nargs="+", help="curve CSV/JSON files")
    p_plot.add_argument("--out", required=True, help="figure path (.png/.pdf)")
    p_plot.add_argument("--title", default=None)

    args = parser.parse_args(argv)
    try:
        if args.command == "sweep":
            curve = run_sweep(_build_config(args), parse_grid(args.grid), workers=args.workers)
            _emit_and_plot(curve, args)
        elif args.command == "analytic":
            curve = run_analytic_overlay(_build_config(args), parse_grid(args.grid))
            _emit_and_plot(curve, args)
        elif args.command == "ici-var":
            cfg = _build_config(args)
            print(repr(ici_variance(cfg, trials=args.ici_trials)))
        elif args.command == "selftest":
            from .selftest import run_selftest
            if not run_selftest():
                print("selftest: FAILED", file=sys.stderr)
                return 1
        elif args.command == "plot":
            from .report import plot_curve_files
            plot_curve_files(args.files, args.out, title=args.title)
            print(f"wrote {args.out}")
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
