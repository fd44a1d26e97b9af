"""End-to-end acceptance criteria.

Each test records one PASS/FAIL line (shown in the terminal summary) and then
asserts the same condition, so a failing criterion is visible both ways.
Tolerances are the published ones; nothing here is tuned to make a red
criterion green.
"""

import os
import time

import numpy as np
import pytest
from scipy.stats import spearmanr

from qmetastable import BathParams, InsufficientResolution, build_rate_matrix, evolve, relaxation_time
from qmetastable import solve_spectrum, splittings
from qmetastable import sweep as sw

from conftest import CONFIG1, CONFIG2, record

GAMMAS = tuple(sw._grid(0.2, 2.5, 0.05))
TEMPS = tuple(sw._grid(0.12, 0.6, 0.01))
T_FIXED = 0.352
T_AXIS_GAMMAS = (0.5, 1.5)
WORKERS = min(4, os.cpu_count() or 1)
SHARP_FALL = 2.0  # peak tau over the lowest tau after it
T_MINIMA = {}


def sweep(potential, n_levels, gammas, temps, **kw):
    cfg = sw.SweepConfig(potential=potential, n_levels=n_levels, gammas=gammas, temperatures=temps, workers=WORKERS, **kw)
    t0 = time.perf_counter()
    records = sw.run_sweep(cfg)
    return records, time.perf_counter() - t0


def qnes_shape(records):
    """(ok, report or None, message) for 'interior maximum followed by a sharp fall'."""
    try:
        rep = sw.detect_features(records, "gamma")
    except InsufficientResolution as exc:
        return False, None, f"InsufficientResolution: {exc}"
    if not rep.interior_max or rep.fall_off is None:
        return False, rep, f"no interior maximum with a fall-off (argmax={rep.argmax}, not reached at {len(rep.not_reached)} points)"
    tau = np.array(rep.tau)
    k = rep.x.index(rep.peak)
    ratio = tau[k] / tau[k:].min()
    ok = ratio >= SHARP_FALL
    return ok, rep, f"peak at gamma={rep.peak}, fall-off {rep.fall_off} (peak/min {ratio:.2f}), gamma_c={rep.critical:.3f}"


@pytest.fixture(scope="session")
def qnes50():
    return sweep(CONFIG1, 6, GAMMAS, (T_FIXED,))


@pytest.fixture(scope="session")
def t_axis():
    out = {}
    for name, pot, n in (("config1", CONFIG1, 6), ("config2", CONFIG2, 8)):
        records, _ = sweep(pot, n, T_AXIS_GAMMAS, TEMPS)
        out[name] = records
    return out


def test_c01_spectrum_config1():
    t0 = time.perf_counter()
    gaps = splittings(solve_spectrum(CONFIG1, n_levels=6))
    elapsed = time.perf_counter() - t0
    d43, d21 = gaps[2], gaps[0]
    ok = abs(d43 - 0.20) <= 0.01 and abs(d21 - 0.985) <= 0.01 and elapsed < 5
    record(1, "spectrum config 1", ok, f"E4-E3={d43:.4f} (0.20+-0.01), E2-E1={d21:.4f} (0.985+-0.01), {elapsed:.2f}s")
    assert ok


def test_c02_spectrum_config2():
    t0 = time.perf_counter()
    gaps = splittings(solve_spectrum(CONFIG2, n_levels=8))
    elapsed = time.perf_counter() - t0
    d76, d65, d54 = gaps[5], gaps[4], gaps[3]
    ok = abs(d76 - 0.14) <= 0.01 and abs(d65 - 0.58) <= 0.01 and abs(d54 - 0.10) <= 0.01 and elapsed < 5
    record(2, "spectrum config 2", ok, f"dE76={d76:.4f}, dE65={d65:.4f}, dE54={d54:.4f}, {elapsed:.2f}s")
    assert ok


def test_c03_detailed_balance(dvr1):
    T = 0.352
    g = build_rate_matrix(dvr1, BathParams(1.0, T)).gamma_matrix
    e = dvr1.dvr_energies
    worst = 0.0
    for mu in range(dvr1.size):
        for nu in range(mu + 1, dvr1.size):
            if dvr1.couplings[mu, nu] != 0:
                worst = max(worst, abs(np.log(g[mu, nu] / g[nu, mu]) - (e[nu] - e[mu]) / T))
    w = np.exp(-(e - e.min()) / T)
    p = np.linalg.svd(g)[2][-1]
    p = p / p.sum()
    dev = np.max(np.abs(p - w / w.sum()))
    ok = worst < 1e-3 and dev < 1e-3
    record(3, "detailed balance", ok, f"max log error {worst:.2e}, stationary vs Boltzmann {dev:.2e}")
    assert ok


def test_c04_conservation_and_positivity(dvr1, dvr2):
    worst_sum, worst_min, n = 0.0, np.inf, 0
    cases = [(dvr1, g, T_FIXED) for g in GAMMAS]
    cases += [(d, g, t) for d in (dvr1, dvr2) for g in T_AXIS_GAMMAS for t in TEMPS]
    for basis, g, t in cases:
        rm = build_rate_matrix(basis, BathParams(g, t))
        horizon = min(1e4 * relaxation_time(rm), 1e9)
        rho0 = np.zeros(basis.size)
        rho0[basis.n_metastable] = 1.0
        pops = evolve(rm, rho0, horizon, 200).populations
        worst_sum = max(worst_sum, np.max(np.abs(pops.sum(axis=1) - 1)))
        worst_min = min(worst_min, pops.min())
        n += 1
    ok = worst_sum < 1e-10 and worst_min > -1e-12
    record(4, "conservation and positivity", ok, f"{n} trajectories, max |sum-1|={worst_sum:.1e}, min rho={worst_min:.1e}")
    assert ok


def test_c05_qnes(qnes50):
    records, elapsed = qnes50
    ok, rep, msg = qnes_shape(records)
    in_band = rep is not None and rep.critical is not None and 0.8 <= rep.critical <= 1.2
    passed = ok and in_band and elapsed < 600
    record(5, "QNES peak and gamma_c in [0.8, 1.2]", passed, f"{msg}; {len(records)} points in {elapsed:.1f}s")
    assert passed


def test_c06_zeno_tail(qnes50):
    records, _ = qnes50
    ok, rep, msg = qnes_shape(records)
    if rep is None or rep.fall_off is None:
        record(6, "Zeno tail monotone", False, msg)
        pytest.fail(msg)
    x, tau = np.array(rep.x), np.array(rep.tau)
    tail = tau[x >= rep.fall_off[1]]
    mono = bool(np.all(np.diff(tail) > 0))
    record(6, "Zeno tail monotone", mono, f"{len(tail)} points from gamma={rep.fall_off[1]}, increasing={mono}")
    assert mono


@pytest.mark.parametrize(
    "name,band",
    [("config1", (0.15, 0.30)), ("config2", (0.20, 0.35))],
)
def test_c07_temperature_minimum(t_axis, name, band):
    lines, ok = [], True
    for g in T_AXIS_GAMMAS:
        sub = [r for r in t_axis[name] if r.gamma == g]
        try:
            rep = sw.detect_features(sub, "temperature")
            hit = rep.interior_min and band[0] <= rep.argmin <= band[1]
            lines.append(f"gamma={g}: min at T={rep.argmin}{' (edge)' if not rep.interior_min else ''}")
        except InsufficientResolution as exc:
            hit = False
            lines.append(f"gamma={g}: {exc}")
        ok &= hit
    T_MINIMA[name] = (ok, f"{name} band {band}: " + ", ".join(lines))
    parts = T_MINIMA.values()
    record(7, "tau(T) minimum", all(p[0] for p in parts), "; ".join(p[1] for p in parts))
    assert ok


def test_c08_relaxation_tracking(qnes50):
    records, _ = qnes50
    ok, rep, msg = qnes_shape(records)
    if rep is None or rep.peak is None:
        record(8, "tau tracks tau_relax", False, msg)
        pytest.fail(msg)
    pre = [r for r in records if r.gamma <= rep.peak]
    rho = spearmanr([r.tau for r in pre], [r.tau_relax for r in pre])[0]
    tr = np.array([r.tau_relax for r in records])
    strict = bool(np.all(np.diff(tr) > 0))
    passed = rho > 0.95 and strict
    record(8, "tau tracks tau_relax", passed, f"Spearman {rho:.3f} over {len(pre)} pre-peak points, tau_relax increasing={strict}")
    assert passed


def test_c09_cutoff_insensitivity(qnes50):
    gammas = GAMMAS
    base, _ = qnes50
    note = ""
    for _ in range(3):
        hi, _ = sweep(CONFIG1, 6, gammas, (T_FIXED,), omega_c=100.0)
        ok50, rep50, _ = qnes_shape(base)
        ok100, rep100, msg100 = qnes_shape(hi)
        if rep50 is not None and rep100 is not None:
            break
        # refine both grids together and retry
        step = (gammas[1] - gammas[0]) / 2
        gammas = tuple(sw._grid(0.2, 2.5, step))
        note = f" (grid refined to step {step:g})"
        base, _ = sweep(CONFIG1, 6, gammas, (T_FIXED,))
    if rep50 is None or rep100 is None or rep50.critical is None or rep100.critical is None:
        record(9, "cutoff insensitivity", False, f"omega_c=100: {msg100}{note}")
        pytest.fail(msg100)
    shift = abs(rep100.critical - rep50.critical)
    t50 = dict(zip(rep50.x, rep50.tau))[rep50.peak]
    t100 = dict(zip(rep100.x, rep100.tau))[rep100.peak]
    rel = abs(t100 - t50) / t50
    passed = shift < 0.05 and rel < 0.05
    record(
        9,
        "cutoff insensitivity",
        passed,
        f"gamma_c {rep50.critical:.3f} -> {rep100.critical:.3f} (shift {shift:.3f}), peak tau {t50:.1f} -> {t100:.1f} ({100 * rel:.1f}%){note}",
    )
    assert passed


def test_c10_robustness(dvr1):
    lines, ok = [], True
    variants = [dict(threshold=0.9), dict(threshold=0.99)]
    variants += [dict(initial_state=k + 1) for k in dvr1.unstable_states()]
    for v in variants:
        records, _ = sweep(CONFIG1, 6, GAMMAS, (T_FIXED,), **v)
        good, rep, msg = qnes_shape(records)
        ok &= good
        lines.append(f"{v}: {'ok' if good else 'lost'} ({msg})")
    record(10, "robustness of the QNES shape", ok, "; ".join(lines))
    assert ok
