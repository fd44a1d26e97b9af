"""Lowest eigenpairs of H0 = p**2/2 + V(q) on a uniform grid.

The kinetic energy is the sinc-DVR (Colbert-Miller) operator, which converges
exponentially in the grid spacing for smooth potentials; tunneling splittings
of order 0.1 are very sensitive to discretization error, so a low-order finite
difference stencil would not do.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Union

import numpy as np
import scipy.linalg as la

from . import potential as pot
from .errors import ConfigError, GridTooCoarse

MAX_LEVELS = 16
DEFAULT_POINTS = 1024
EDGE_MARGIN = 3.0
CONVERGENCE_TOL = 1e-6

PotentialLike = Union[pot.PotentialParams, Callable[[np.ndarray], np.ndarray]]


@dataclass(frozen=True)
class GridConfig:
    q_min: float = -8.0
    q_max: float = 8.0
    n_points: int = DEFAULT_POINTS

    def __post_init__(self):
        if not self.q_max > self.q_min:
            raise ConfigError("q_max must exceed q_min")
        if self.n_points < 16:
            raise ConfigError("n_points must be at least 16")

    @property
    def points(self) -> np.ndarray:
        return np.linspace(self.q_min, self.q_max, self.n_points)

    @property
    def spacing(self) -> float:
        return (self.q_max - self.q_min) / (self.n_points - 1)

    def refined(self) -> "GridConfig":
        return replace(self, n_points=2 * self.n_points)

    @classmethod
    def for_potential(cls, params: pot.PotentialParams, n_points: int = DEFAULT_POINTS) -> "GridConfig":
        """Grid reaching EDGE_MARGIN beyond both barrier-energy turning points.

        Never narrower than [-8, 8].
        """
        geo = pot.geometry(params)
        q_min = min(-8.0, np.floor(geo.q_left_turn - EDGE_MARGIN - 0.5))
        q_max = max(8.0, np.ceil(geo.q_exit + EDGE_MARGIN + 0.5))
        return cls(float(q_min), float(q_max), n_points)

    def check_covers(self, params: pot.PotentialParams) -> None:
        geo = pot.geometry(params)
        if not (self.q_min < geo.q_left_min - EDGE_MARGIN and self.q_max > geo.q_exit + EDGE_MARGIN):
            raise ConfigError(
                f"grid [{self.q_min}, {self.q_max}] does not extend {EDGE_MARGIN} beyond "
                f"the wells ({geo.q_left_min:.3f}, exit {geo.q_exit:.3f})"
            )


@dataclass(frozen=True)
class EigenSolution:
    """Eigenpairs on a grid.

    ``wavefunctions`` has shape ``(n_points, n_levels)``; columns are
    orthonormal under the quadrature weight ``grid.spacing``.
    """

    energies: np.ndarray
    wavefunctions: np.ndarray
    grid: GridConfig
    potential_values: np.ndarray

    @property
    def q(self) -> np.ndarray:
        return self.grid.points

    @property
    def dx(self) -> float:
        return self.grid.spacing

    @property
    def n_levels(self) -> int:
        return len(self.energies)

    def overlap(self) -> np.ndarray:
        return self.wavefunctions.T @ self.wavefunctions * self.dx

    def matrix_element(self, op_diag: np.ndarray) -> np.ndarray:
        """<psi_n| f(q) |psi_m> for a local operator sampled on the grid."""
        psi = self.wavefunctions
        return psi.T @ (op_diag[:, None] * psi) * self.dx


def kinetic_matrix(n_points: int, dx: float) -> np.ndarray:
    """Sinc-DVR kinetic energy T_ij for p**2/2 on a uniform grid."""
    d = np.subtract.outer(np.arange(n_points), np.arange(n_points))
    off = np.where(d == 0, 1, d).astype(float)
    t = np.where(d == 0, np.pi**2 / 3.0, 2.0 / off**2)
    t *= np.where(d % 2 == 0, 1.0, -1.0)
    return t / (2.0 * dx**2)


def _potential_on(potential: PotentialLike, q: np.ndarray) -> np.ndarray:
    if isinstance(potential, pot.PotentialParams):
        return pot.evaluate(potential, q)
    return np.asarray(potential(q), dtype=float)


def _diagonalize(potential: PotentialLike, grid: GridConfig, n_levels: int):
    q = grid.points
    v = _potential_on(potential, q)
    h = kinetic_matrix(grid.n_points, grid.spacing)
    h[np.diag_indices_from(h)] += v
    energies, vecs = la.eigh(h, subset_by_index=[0, n_levels - 1], overwrite_a=True)
    return energies, vecs / np.sqrt(grid.spacing), v


def _fix_signs(psi: np.ndarray, threshold: float = 1e-6) -> np.ndarray:
    psi = psi.copy()
    for n in range(psi.shape[1]):
        col = psi[:, n]
        first = np.flatnonzero(np.abs(col) > threshold)[0]
        if col[first] < 0:
            psi[:, n] = -col
    return psi


def solve_spectrum(
    potential: PotentialLike,
    grid: GridConfig | None = None,
    n_levels: int = 6,
    check_convergence: bool = True,
) -> EigenSolution:
    """Lowest ``n_levels`` eigenpairs of the grid Hamiltonian.

    Parameters
    ----------
    potential : PotentialParams or callable
        The quartic well, or any vectorized V(q) (used for self-checks).
    grid : GridConfig, optional
        Defaults to :meth:`GridConfig.for_potential` for quartic wells.
    n_levels : int
        Number of levels to return, at most 16.
    check_convergence : bool
        Re-solve on a grid with twice the points and raise
        :class:`GridTooCoarse` if any energy moves by more than 1e-6.
    """
    if not 1 <= n_levels <= MAX_LEVELS:
        raise ConfigError(f"n_levels must be in 1..{MAX_LEVELS}")
    if grid is None:
        if not isinstance(potential, pot.PotentialParams):
            raise ConfigError("an explicit grid is required for a callable potential")
        grid = GridConfig.for_potential(potential)
    elif isinstance(potential, pot.PotentialParams):
        grid.check_covers(potential)

    energies, psi, v = _diagonalize(potential, grid, n_levels)
    if check_convergence:
        fine, _, _ = _diagonalize(potential, grid.refined(), n_levels)
        shift = np.max(np.abs(fine - energies))
        if shift > CONVERGENCE_TOL:
            raise GridTooCoarse(f"energies shift by {shift:.3g} when doubling n_points")
    return EigenSolution(energies, _fix_signs(psi), grid, v)


def splittings(sol: EigenSolution | np.ndarray) -> np.ndarray:
    """Consecutive gaps E[n+1] - E[n]."""
    energies = sol.energies if isinstance(sol, EigenSolution) else np.asarray(sol, dtype=float)
    if len(energies) < 2:
        raise ConfigError("need at least two levels")
    return np.diff(energies)
