"""Command-line front end.

All inputs and outputs are in natural units: energies and temperatures in
hbar*omega_0 (k_B = 1), times in 1/omega_0, damping gamma in omega_0.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys

import numpy as np

from . import dynamics as dyn
from . import sweep as sw
from .bath import BathCorrelation, BathParams
from .errors import ConfigError, NumericalError, QMetastableError
from .rates import build_rate_matrix, validate_regime
from .spectrum import GridConfig, solve_spectrum, splittings

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 1, 2


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file (keys of SweepConfig)")
    p.add_argument("--preset", choices=sorted(sw.PRESETS), help="built-in parameter set")
    p.add_argument("--out", help="output path (default: stdout, or sweep.csv for sweep)")
    p.add_argument("--threshold", type=float, help="P_right level defining the escape time")
    p.add_argument("--initial-state", type=int, help="1-based DVR state populated at t = 0")
    p.add_argument("--omega-c", type=float, help="bath cutoff frequency")


def _point(p: argparse.ArgumentParser) -> None:
    p.add_argument("--gamma", type=float, required=True, help="damping strength")
    p.add_argument("--temperature", type=float, required=True, help="bath temperature")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qmetastable",
        description="Escape times from a quantum metastable state in a damped asymmetric double well.",
    )
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="print eigenenergies and level spacings")
    _common(p)

    p = sub.add_parser("rates", help="write the rate matrix for one (gamma, T) as CSV")
    _common(p)
    _point(p)

    p = sub.add_parser("evolve", help="write a population trajectory as CSV")
    _common(p)
    _point(p)
    p.add_argument("--horizon", type=float, help="final time (default: 10 relaxation times)")
    p.add_argument("--samples", type=int, default=400, help="number of log-spaced times")

    p = sub.add_parser("escape", help="escape and relaxation time for one (gamma, T)")
    _common(p)
    _point(p)

    p = sub.add_parser("sweep", help="run a (gamma, T) grid and write CSV + feature report")
    _common(p)
    p.add_argument("--workers", type=int, help="parallel worker processes")
    p.add_argument("--gamma", type=_floats, help="comma-separated gamma values (overrides config)")
    p.add_argument("--temperature", type=_floats, help="comma-separated temperatures (overrides config)")

    p = sub.add_parser("features", help="detect extrema and fall-off in a sweep CSV")
    p.add_argument("csv", help="CSV written by the sweep subcommand")
    p.add_argument("--axis", choices=["gamma", "temperature"], help="restrict to one axis")
    p.add_argument("--out", help="write the JSON report here instead of stdout")
    return parser


def _config(args) -> sw.SweepConfig:
    return sw.load_config(
        args.config,
        args.preset,
        threshold=args.threshold,
        initial_state=args.initial_state,
        omega_c=args.omega_c,
    )


def _open_out(path):
    return open(path, "w", newline="") if path else sys.stdout


def _bath(args, config) -> BathParams:
    return BathParams(args.gamma, args.temperature, config.omega_c)


def cmd_spectrum(args) -> int:
    config = _config(args)
    grid = GridConfig.for_potential(config.potential, config.grid_points)
    sol = solve_spectrum(config.potential, grid, config.n_levels)
    gaps = splittings(sol)
    with _open_out(args.out) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["n", "energy", "gap_to_previous"])
        for n, e in enumerate(sol.energies, start=1):
            w.writerow([n, repr(float(e)), repr(float(gaps[n - 2])) if n > 1 else ""])
    return EXIT_OK


def cmd_rates(args) -> int:
    config = _config(args)
    system = sw.prepare(config)
    rm = build_rate_matrix(system.dvr, BathCorrelation(_bath(args, config)))
    for fl in rm.flags:
        print(f"warning: {fl}", file=sys.stderr)
    with _open_out(args.out) as fh:
        w = csv.writer(fh, lineterminator="\n")
        for row in rm.gamma_matrix:
            w.writerow([repr(float(x)) for x in row])
    return EXIT_OK


def cmd_evolve(args) -> int:
    config = _config(args)
    system = sw.prepare(config)
    rm = build_rate_matrix(system.dvr, BathCorrelation(_bath(args, config)))
    horizon = args.horizon or 10.0 * dyn.relaxation_time(rm)
    traj = dyn.evolve(rm, system.rho0, horizon, args.samples)
    p_right = dyn.right_population(traj, system.partition)
    with _open_out(args.out) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t"] + [f"rho_{k}" for k in range(1, rm.size + 1)] + ["p_right"])
        for t, row, pr in zip(traj.times, traj.populations, p_right):
            w.writerow([repr(float(t))] + [repr(float(x)) for x in row] + [repr(float(pr))])
    return EXIT_OK


def cmd_escape(args) -> int:
    config = _config(args)
    system = sw.prepare(config)
    bath = _bath(args, config)
    rm = build_rate_matrix(system.dvr, BathCorrelation(bath))
    res = dyn.escape_time(rm, system.rho0, system.partition, config.threshold, n_metastable=system.dvr.n_metastable)
    out = {
        "gamma": bath.gamma,
        "temperature": bath.temperature,
        "omega_c": bath.omega_c,
        "threshold": res.threshold,
        "initial_state": system.initial_index + 1,
        "tau": res.escape_time if res.reached else sw.NOT_REACHED,
        "tau_relax": res.relaxation_time,
        "metastable_peak": res.metastable_peak,
        "stationary_pright": res.stationary_right,
        "flags": [str(f) for f in rm.flags] + list(validate_regime(bath).codes()),
    }
    with _open_out(args.out) as fh:
        json.dump(out, fh, indent=2)
        fh.write("\n")
    return EXIT_OK


def cmd_sweep(args) -> int:
    config = _config(args)
    config = sw.with_overrides(
        config,
        workers=args.workers,
        gammas=tuple(args.gamma) if args.gamma else None,
        temperatures=tuple(args.temperature) if args.temperature else None,
    )
    records = sw.run_sweep(config)
    report = sw.summarize(records)
    paths = sw.emit_outputs(records, report, config, args.out)
    failed = sum(r.failed for r in records)
    print(f"{len(records)} points ({failed} failed) -> " + ", ".join(str(p) for p in paths.values()))
    return EXIT_OK


def cmd_features(args) -> int:
    records = sw.read_csv(args.csv)
    report = sw.summarize(records)
    if args.axis:
        report = [r for r in report if r["axis"] == args.axis]
    with _open_out(args.out) as fh:
        json.dump(report, fh, indent=2)
        fh.write("\n")
    return EXIT_OK


COMMANDS = {
    "spectrum": cmd_spectrum,
    "rates": cmd_rates,
    "evolve": cmd_evolve,
    "escape": cmd_escape,
    "sweep": cmd_sweep,
    "features": cmd_features,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    np.seterr(all="ignore")
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, QMetastableError, ArithmeticError) as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
