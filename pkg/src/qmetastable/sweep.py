"""Parameter sweeps over (gamma, T), feature detection and file output."""

from __future__ import annotations

import csv
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from . import dynamics as dyn
from .bath import DEFAULT_CUTOFF, BathCorrelation, BathParams
from .dvr import DvrBasis, build_dvr, default_initial_state
from .errors import ConfigError, InsufficientResolution, QMetastableError
from .potential import PotentialParams
from .rates import build_rate_matrix, validate_regime
from .spectrum import GridConfig, solve_spectrum

log = logging.getLogger(__name__)

CSV_HEADER = ["gamma", "temperature", "tau", "tau_relax", "metastable_peak", "stationary_pright", "flags"]
NOT_REACHED = "NOT_REACHED"
MAX_ADJACENT_RATIO = 10.0


def _grid(start: float, stop: float, step: float) -> list[float]:
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + k * step, 12) for k in range(n)]


PRESETS = {
    "paper-fig2": {
        "potential": {"barrier_height": 1.4, "asymmetry": 0.27},
        "n_levels": 6,
        "gammas": {"start": 0.2, "stop": 2.5, "step": 0.05},
        # only T = 0.352 is named in the source; the others are illustrative
        "temperatures": [0.25, 0.352, 0.5],
        "omega_c": DEFAULT_CUTOFF,
        "threshold": 0.95,
    },
    "paper-fig3": {
        "potential": {"barrier_height": 2.5, "asymmetry": 0.35},
        "n_levels": 8,
        "gammas": {"start": 0.2, "stop": 2.5, "step": 0.05},
        "temperatures": [0.2, 0.27, 0.352],
        "omega_c": DEFAULT_CUTOFF,
        "threshold": 0.95,
    },
}


@dataclass(frozen=True)
class SweepConfig:
    """Everything needed to run a sweep.

    ``initial_state`` and ``partition`` use the 1-based state labels of the
    DVR (state 3 is the third position from the left). ``partition`` is the
    number of states excluded from P_right; None derives it from the
    potential geometry.
    """

    potential: PotentialParams
    gammas: tuple = (1.0,)
    temperatures: tuple = (0.352,)
    n_levels: int = 6
    m_levels: int | None = None
    omega_c: float = DEFAULT_CUTOFF
    initial_state: int | None = None
    partition: int | None = None
    threshold: float = 0.95
    grid_points: int = 1024
    output: str | None = None
    workers: int = 1
    plot_script: bool = True

    def __post_init__(self):
        if not self.gammas or not self.temperatures:
            raise ConfigError("gamma and temperature grids must be nonempty")
        if any(not g > 0 for g in self.gammas) or any(not t > 0 for t in self.temperatures):
            raise ConfigError("grid values must be positive")
        if not 0.0 < self.threshold < 1.0:
            raise ConfigError("threshold must lie in (0, 1)")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")

    @classmethod
    def from_dict(cls, data: dict) -> "SweepConfig":
        data = dict(data)
        unknown = set(data) - {f for f in cls.__dataclass_fields__} - {"preset"}
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        base = dict(PRESETS[data.pop("preset")]) if "preset" in data else {}
        base.update(data)
        try:
            base["potential"] = PotentialParams(**base["potential"])
        except KeyError:
            raise ConfigError("config needs a 'potential' section") from None
        except TypeError as exc:
            raise ConfigError(f"bad potential section: {exc}") from None
        for key in ("gammas", "temperatures"):
            if key in base:
                base[key] = _axis(base[key], key)
        return cls(**base)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["gammas"] = list(self.gammas)
        out["temperatures"] = list(self.temperatures)
        return out


def _axis(value, name) -> tuple:
    if isinstance(value, dict):
        try:
            return tuple(_grid(float(value["start"]), float(value["stop"]), float(value["step"])))
        except KeyError as exc:
            raise ConfigError(f"{name} range needs start/stop/step, missing {exc}") from None
    if isinstance(value, (int, float)):
        return (float(value),)
    return tuple(float(v) for v in value)


def load_config(path=None, preset: str | None = None, **overrides) -> SweepConfig:
    """Build a config from a preset, a JSON file, and keyword overrides (in that order)."""
    data: dict = {}
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset {preset!r}; choose from {sorted(PRESETS)}")
        data["preset"] = preset
    if path is not None:
        try:
            with open(path) as fh:
                data.update(json.load(fh))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
    data.update({k: v for k, v in overrides.items() if v is not None})
    if not data:
        data["preset"] = "paper-fig2"
    return SweepConfig.from_dict(data)


@dataclass(frozen=True)
class PreparedSystem:
    """Spectrum and DVR shared read-only by all points of a sweep."""

    dvr: DvrBasis
    initial_index: int
    partition: int

    @property
    def rho0(self) -> np.ndarray:
        return dyn.basis_state(self.dvr.size, self.initial_index)


def prepare(config: SweepConfig) -> PreparedSystem:
    grid = GridConfig.for_potential(config.potential, config.grid_points)
    sol = solve_spectrum(config.potential, grid, config.n_levels)
    basis = build_dvr(sol, config.m_levels, config.potential)
    partition = basis.partition if config.partition is None else config.partition
    if not 0 < partition < basis.size:
        raise ConfigError(f"partition must be in 1..{basis.size - 1}")
    if config.initial_state is None:
        initial = default_initial_state(basis)
    else:
        initial = config.initial_state - 1
        if not 0 <= initial < basis.size:
            raise ConfigError(f"initial_state must be in 1..{basis.size}")
    return PreparedSystem(basis, initial, partition)


@dataclass(frozen=True)
class SweepRecord:
    gamma: float
    temperature: float
    tau: float | None
    tau_relax: float
    metastable_peak: float
    stationary_pright: float
    flags: tuple = field(default=())

    @property
    def reached(self) -> bool:
        return self.tau is not None and not math.isnan(self.tau)

    @property
    def failed(self) -> bool:
        return any(f.startswith("error") for f in self.flags)


def evaluate_point(system: PreparedSystem, gamma: float, temperature: float, omega_c: float, threshold: float) -> SweepRecord:
    """One (gamma, T) point; numerical errors become an ``error`` flag."""
    try:
        bath = BathParams(gamma, temperature, omega_c)
        regime = validate_regime(bath)
        rm = build_rate_matrix(system.dvr, BathCorrelation(bath))
        res = dyn.escape_time(
            rm, system.rho0, system.partition, threshold, n_metastable=system.dvr.n_metastable
        )
    except (QMetastableError, ArithmeticError, np.linalg.LinAlgError) as exc:
        log.warning("point gamma=%g T=%g failed: %s", gamma, temperature, exc)
        nan = float("nan")
        return SweepRecord(gamma, temperature, nan, nan, nan, nan, (f"error:{type(exc).__name__}",))
    flags = tuple(str(f) for f in rm.flags) + regime.codes()
    return SweepRecord(
        gamma,
        temperature,
        res.escape_time,
        float(res.relaxation_time),
        res.metastable_peak,
        res.stationary_right,
        flags,
    )


def _run_column(system, temperature, gammas, omega_c, threshold):
    return [evaluate_point(system, g, temperature, omega_c, threshold) for g in gammas]


def run_sweep(config: SweepConfig, system: PreparedSystem | None = None) -> list[SweepRecord]:
    """Evaluate every (gamma, T) point; records are ordered by T, then gamma.

    Points sharing a temperature run in the same task so they reuse one bath
    correlation table. The result does not depend on ``config.workers``.
    """
    if system is None:
        system = prepare(config)
    columns = [(system, t, config.gammas, config.omega_c, config.threshold) for t in config.temperatures]
    if config.workers == 1 or len(columns) == 1:
        results = [_run_column(*c) for c in columns]
    else:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            futures = [pool.submit(_run_column, *c) for c in columns]
            results = [f.result() for f in futures]
    return [rec for col in results for rec in col]


# feature detection -------------------------------------------------------------


@dataclass(frozen=True)
class FeatureReport:
    axis: str
    fixed_value: float
    x: tuple
    tau: tuple
    argmax: float | None
    argmin: float | None
    peak: float | None
    interior_max: bool
    interior_min: bool
    fall_off: tuple | None
    critical: float | None
    segments: tuple
    not_reached: tuple

    def to_dict(self) -> dict:
        d = asdict(self)
        d["tau"] = [None if math.isinf(t) else t for t in self.tau]
        return d


def _segments(x, y):
    out = []
    start = 0
    direction = None
    for k in range(1, len(x)):
        step = "increasing" if y[k] > y[k - 1] else "decreasing" if y[k] < y[k - 1] else "flat"
        if direction is None:
            direction = step
        elif step != direction:
            out.append((x[start], x[k - 1], direction))
            start, direction = k - 1, step
    if direction is not None:
        out.append((x[start], x[-1], direction))
    return tuple(out)


def detect_features(records, axis: str = "gamma", max_ratio: float = MAX_ADJACENT_RATIO) -> FeatureReport:
    """Locate the extrema and the post-peak fall-off of tau along one axis.

    ``argmax`` and ``argmin`` are global. ``peak`` is the interior local
    maximum with the largest tau; it can differ from ``argmax`` when tau
    grows again towards the end of the grid. The fall-off is the adjacent
    pair with the largest tau ratio after ``peak``; ``critical`` is its
    midpoint. NotReached points count as tau = inf for the minimum search and
    are skipped for maxima; failed points are dropped.
    """
    if axis not in ("gamma", "temperature"):
        raise ConfigError("axis must be 'gamma' or 'temperature'")
    other = "temperature" if axis == "gamma" else "gamma"
    records = [r for r in records if not r.failed]
    fixed = {getattr(r, other) for r in records}
    if len(fixed) > 1:
        raise ConfigError(f"records mix several {other} values: {sorted(fixed)}")
    if len(records) < 5:
        raise ConfigError("need at least 5 points on the varying axis")
    records = sorted(records, key=lambda r: getattr(r, axis))
    x = [getattr(r, axis) for r in records]
    tau = [r.tau if r.reached else math.inf for r in records]

    for k in range(1, len(x)):
        a, b = tau[k - 1], tau[k]
        if math.isfinite(a) and math.isfinite(b) and a > 0 and b > 0 and max(a / b, b / a) > max_ratio:
            raise InsufficientResolution(
                f"tau changes by a factor {max(a / b, b / a):.3g} between {axis}={x[k - 1]} and {x[k]}"
            )

    finite = [k for k, t in enumerate(tau) if math.isfinite(t)]
    imax = max(finite, key=lambda k: tau[k]) if finite else None
    imin = min(range(len(x)), key=lambda k: tau[k])
    local = [k for k in range(1, len(x) - 1) if math.isfinite(tau[k]) and tau[k - 1] < tau[k] > tau[k + 1]]
    ipeak = max(local, key=lambda k: tau[k]) if local else None
    interior_min = math.isfinite(tau[imin]) and 0 < imin < len(x) - 1

    fall, crit = None, None
    if ipeak is not None:
        best = None
        for k in range(ipeak, len(x) - 1):
            a, b = tau[k], tau[k + 1]
            if math.isfinite(a) and math.isfinite(b) and b < a:
                ratio = a / b
                if best is None or ratio > best[0]:
                    best = (ratio, k)
        if best is not None:
            k = best[1]
            fall = (x[k], x[k + 1])
            crit = 0.5 * (x[k] + x[k + 1])

    return FeatureReport(
        axis=axis,
        fixed_value=fixed.pop(),
        x=tuple(x),
        tau=tuple(tau),
        argmax=x[imax] if imax is not None else None,
        argmin=x[imin] if math.isfinite(tau[imin]) else None,
        peak=x[ipeak] if ipeak is not None else None,
        interior_max=ipeak is not None,
        interior_min=interior_min,
        fall_off=fall,
        critical=crit,
        segments=_segments(x, tau),
        not_reached=tuple(xx for xx, t in zip(x, tau) if math.isinf(t)),
    )


def summarize(records) -> list[dict]:
    """Feature reports for every temperature (gamma axis) and every gamma (T axis) with >= 5 points."""
    out = []
    for axis, other in (("gamma", "temperature"), ("temperature", "gamma")):
        for value in sorted({getattr(r, other) for r in records}):
            sub = [r for r in records if getattr(r, other) == value]
            if len(sub) < 5:
                continue
            try:
                out.append(detect_features(sub, axis).to_dict())
            except (InsufficientResolution, ConfigError) as exc:
                out.append({"axis": axis, "fixed_value": value, "error": f"{type(exc).__name__}: {exc}"})
    return out


# output ------------------------------------------------------------------------


def _fmt(x) -> str:
    return repr(float(x))


def format_row(rec: SweepRecord) -> list[str]:
    if rec.tau is None:
        tau = NOT_REACHED
    else:
        tau = _fmt(rec.tau)
    return [
        _fmt(rec.gamma),
        _fmt(rec.temperature),
        tau,
        _fmt(rec.tau_relax),
        _fmt(rec.metastable_peak),
        _fmt(rec.stationary_pright),
        ";".join(rec.flags),
    ]


def write_csv(records, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for rec in records:
            w.writerow(format_row(rec))


def read_csv(path) -> list[SweepRecord]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != CSV_HEADER:
        raise ConfigError(f"{path}: not a sweep CSV (header mismatch)")
    out = []
    for row in rows[1:]:
        g, t, tau, tr, peak, stat, flags = row
        out.append(
            SweepRecord(
                float(g),
                float(t),
                None if tau == NOT_REACHED else float(tau),
                float(tr),
                float(peak),
                float(stat),
                tuple(f for f in flags.split(";") if f),
            )
        )
    return out


GNUPLOT_TEMPLATE = """\
# tau vs gamma per temperature, with tau vs T per gamma as an inset
set datafile separator ','
set key autotitle columnhead
set logscale y
set xlabel 'gamma [omega_0]'
set ylabel 'tau [1/omega_0]'
csv = '{csv}'
temps = '{temps}'
gammas = '{gammas}'
set multiplot
plot for [T in temps] csv using 1:(abs($2 - T) < 1e-9 ? $3 : 1/0) with linespoints title sprintf('T = %s', T)
set origin 0.55, 0.5
set size 0.4, 0.4
set xlabel 'T [hbar omega_0/k_B]'
unset ylabel
plot for [G in gammas] csv using 2:(abs($1 - G) < 1e-9 ? $3 : 1/0) with linespoints title sprintf('gamma = %s', G)
unset multiplot
"""


def plot_script(csv_path, config: SweepConfig, inset_gammas=None) -> str:
    if inset_gammas is None:
        g = list(config.gammas)
        inset_gammas = g if len(g) <= 3 else [g[len(g) // 4], g[len(g) // 2], g[3 * len(g) // 4]]
    return GNUPLOT_TEMPLATE.format(
        csv=Path(csv_path).name,
        temps=" ".join(repr(float(t)) for t in config.temperatures),
        gammas=" ".join(repr(float(g)) for g in inset_gammas),
    )


def emit_outputs(records, report, config: SweepConfig, out=None) -> dict:
    """Write the CSV, the JSON feature report and optionally a gnuplot script.

    Returns the paths written, keyed by kind.
    """
    out = Path(out or config.output or "sweep.csv")
    paths = {"csv": out, "features": out.with_suffix(".features.json")}
    write_csv(records, out)
    with open(paths["features"], "w") as fh:
        json.dump({"config": config.to_dict(), "features": report}, fh, indent=2, default=_json_default)
        fh.write("\n")
    if config.plot_script:
        paths["plot"] = out.with_suffix(".gp")
        paths["plot"].write_text(plot_script(out, config))
    return paths


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, PotentialParams):
        return asdict(obj)
    raise TypeError(type(obj).__name__)


def with_overrides(config: SweepConfig, **kw) -> SweepConfig:
    return replace(config, **{k: v for k, v in kw.items() if v is not None})
