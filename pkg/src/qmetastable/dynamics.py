"""Population dynamics under the rate equation, escape and relaxation times."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as la
from scipy.optimize import brentq

from .errors import ConfigError, DegenerateSpectrum, IllConditionedGenerator
from .rates import RateMatrix

ZERO_MODE_CUTOFF = 1e-10
MAX_CONDITION = 1e8
IDENTITY_TOL = 1e-8
HORIZON_FACTOR = 1e4
HORIZON_CAP = 1e9
POINTS_PER_DECADE = 64
DEFAULT_THRESHOLD = 0.95


@dataclass(frozen=True)
class PopulationTrajectory:
    times: np.ndarray
    populations: np.ndarray  # (n_times, M)

    def total(self) -> np.ndarray:
        return self.populations.sum(axis=1)


@dataclass(frozen=True)
class EscapeResult:
    """Outcome of an escape-time calculation.

    ``escape_time`` is None when P_right never reaches ``threshold`` within
    the horizon; ``stationary_right`` then says why.
    """

    escape_time: float | None
    relaxation_time: float
    threshold: float
    metastable_peak: float
    stationary_right: float

    @property
    def reached(self) -> bool:
        return self.escape_time is not None


class Propagator:
    """exp(Gamma t) applied to a fixed initial vector.

    Uses the eigendecomposition of Gamma when its eigenvector matrix is well
    conditioned, and scipy's scaling-and-squaring expm otherwise.
    """

    def __init__(self, gamma_matrix: np.ndarray, rho0: np.ndarray):
        self.gamma = np.asarray(gamma_matrix, dtype=float)
        self.rho0 = np.asarray(rho0, dtype=float)
        self._modes = None
        lam, vec = la.eig(self.gamma)
        # the stationary mode is exactly zero; eig returns it as ~1e-16, which
        # exp(lam t) would amplify into a conservation error at t ~ 1e9
        k = np.argmin(np.abs(lam))
        if abs(lam[k]) < ZERO_MODE_CUTOFF:
            lam[k] = 0.0
            # decaying modes carry no net probability; removing the ~1e-17
            # residue left by rounding in Gamma keeps sum(rho) = 1 at long times
            stat = vec[:, k] / vec[:, k].sum()
            rest = np.arange(len(lam)) != k
            vec[:, rest] -= np.outer(stat, vec[:, rest].sum(axis=0))
        cond = np.linalg.cond(vec)
        if np.isfinite(cond) and cond < MAX_CONDITION:
            coef = la.solve(vec, self.rho0.astype(complex))
            if np.max(np.abs(vec @ coef - self.rho0)) <= IDENTITY_TOL:
                self._modes = (lam, vec, coef)
        if self._modes is None:
            if np.max(np.abs(la.expm(0.0 * self.gamma) @ self.rho0 - self.rho0)) > IDENTITY_TOL:
                raise IllConditionedGenerator("matrix exponential failed the identity check")

    @property
    def uses_eigendecomposition(self) -> bool:
        return self._modes is not None

    def __call__(self, times) -> np.ndarray:
        times = np.atleast_1d(np.asarray(times, dtype=float))
        if self._modes is not None:
            lam, vec, coef = self._modes
            with np.errstate(under="ignore"):
                phase = np.exp(np.outer(times, lam)) * coef
            return np.real(phase @ vec.T)
        return np.array([la.expm(self.gamma * t) @ self.rho0 for t in times])


def _check_rho0(rho0, m: int) -> np.ndarray:
    rho0 = np.asarray(rho0, dtype=float)
    if rho0.shape != (m,):
        raise ConfigError(f"initial populations must have shape ({m},)")
    if np.any(rho0 < 0) or abs(rho0.sum() - 1.0) > 1e-12:
        raise ConfigError("initial populations must be non-negative and sum to 1")
    return rho0


def basis_state(m: int, index: int) -> np.ndarray:
    rho0 = np.zeros(m)
    rho0[index] = 1.0
    return rho0


def _as_matrix(rm) -> np.ndarray:
    return rm.gamma_matrix if isinstance(rm, RateMatrix) else np.asarray(rm, dtype=float)


def log_times(horizon: float, n_samples: int, t_min: float | None = None) -> np.ndarray:
    if t_min is None:
        t_min = min(1e-3, horizon * 1e-6)
    return np.geomspace(t_min, horizon, n_samples)


def evolve(rm, rho0, horizon: float, n_samples: int = 400, t_min: float | None = None) -> PopulationTrajectory:
    """Populations exp(Gamma t) rho0 on a log-spaced grid ending at ``horizon``."""
    g = _as_matrix(rm)
    rho0 = _check_rho0(rho0, g.shape[0])
    if not horizon > 0:
        raise ConfigError("horizon must be positive")
    times = log_times(horizon, n_samples, t_min)
    return PopulationTrajectory(times, Propagator(g, rho0)(times))


def right_population(traj: PopulationTrajectory | np.ndarray, partition: int) -> np.ndarray:
    pops = traj.populations if isinstance(traj, PopulationTrajectory) else np.asarray(traj, dtype=float)
    return pops[..., partition:].sum(axis=-1)


def stationary_distribution(rm) -> np.ndarray:
    g = _as_matrix(rm)
    lam, vec = la.eig(g)
    p = np.real(vec[:, np.argmin(np.abs(lam))])
    return p / p.sum()


def relaxation_time(rm) -> float:
    """1/|Lambda| for the nonzero eigenvalue of smallest magnitude."""
    lam = np.linalg.eigvals(_as_matrix(rm))
    mag = np.abs(lam)
    zero = mag < ZERO_MODE_CUTOFF
    if zero.sum() > 1:
        raise DegenerateSpectrum(f"{zero.sum()} eigenvalues below {ZERO_MODE_CUTOFF:g}")
    rest = mag[~zero]
    if rest.size == 0:
        return np.inf
    return 1.0 / rest.min()


def escape_time(
    rm,
    rho0,
    partition: int,
    threshold: float = DEFAULT_THRESHOLD,
    *,
    n_metastable: int | None = None,
    horizon: float | None = None,
    rtol: float = 1e-6,
) -> EscapeResult:
    """First time P_right(t) = sum of populations with index >= partition reaches ``threshold``.

    The crossing is bracketed on a log grid (64 points per decade) up to the
    horizon (default 1e4 relaxation times, capped at 1e9) and refined with
    Brent's method.
    """
    if not 0.0 < threshold < 1.0:
        raise ConfigError("threshold must lie in (0, 1)")
    g = _as_matrix(rm)
    rho0 = _check_rho0(rho0, g.shape[0])
    t_relax = relaxation_time(g)
    if horizon is None:
        horizon = min(HORIZON_FACTOR * t_relax, HORIZON_CAP) if np.isfinite(t_relax) else HORIZON_CAP
    stat_right = float(stationary_distribution(g)[partition:].sum())
    prop = Propagator(g, rho0)

    t_min = min(1e-4, horizon * 1e-8)
    n = max(int(np.ceil(np.log10(horizon / t_min) * POINTS_PER_DECADE)), 2)
    times = np.geomspace(t_min, horizon, n)
    pops = prop(times)
    p_right = pops[:, partition:].sum(axis=1)
    peak = float(pops[:, :n_metastable].sum(axis=1).max()) if n_metastable else float("nan")

    tau = None
    if rho0[partition:].sum() >= threshold:
        tau = 0.0
    else:
        hit = np.flatnonzero(p_right >= threshold)
        if hit.size:
            k = hit[0]
            lo = times[k - 1] if k > 0 else 0.0
            tau = brentq(
                lambda t: prop(t)[0, partition:].sum() - threshold,
                lo,
                times[k],
                xtol=1e-300,
                rtol=rtol,
            )
    return EscapeResult(tau, t_relax, threshold, peak, stat_right)
