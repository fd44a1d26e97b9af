"""Discrete variable representation over the truncated eigenbasis.

Diagonalizing the position operator inside the span of the lowest M
eigenstates gives M states localized at points q_mu. In that basis the bare
Hamiltonian has diagonal energies E_mu and tunneling couplings Delta_mu_nu.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as la

from . import potential as pot
from .errors import ConfigError, TruncationInconsistent
from .spectrum import EigenSolution


@dataclass(frozen=True)
class DvrBasis:
    """Localized basis.

    Attributes
    ----------
    q_points : ndarray, shape (M,)
        Ascending DVR positions.
    transform : ndarray, shape (M, M)
        Orthogonal matrix U; column mu holds the energy-basis components of
        the localized state |q_mu>.
    energies : ndarray, shape (M,)
        Eigenenergies E_n of the retained levels.
    hamiltonian : ndarray, shape (M, M)
        U^T diag(E) U, the bare Hamiltonian in the DVR basis.
    partition : int
        Number of states not in the stable well: indices ``< partition``
        lie left of ``q_c``, indices ``>= partition`` sum to P_right.
    n_metastable : int
        Number of states left of the barrier top.
    """

    q_points: np.ndarray
    transform: np.ndarray
    energies: np.ndarray
    hamiltonian: np.ndarray
    partition: int
    n_metastable: int

    @property
    def size(self) -> int:
        return len(self.q_points)

    @property
    def dvr_energies(self) -> np.ndarray:
        return np.diag(self.hamiltonian).copy()

    @property
    def couplings(self) -> np.ndarray:
        """Delta_mu_nu with a zero diagonal (hbar = 1)."""
        delta = self.hamiltonian.copy()
        np.fill_diagonal(delta, 0.0)
        return delta

    def unstable_states(self) -> list[int]:
        """Indices of states between the barrier top and q_c."""
        return list(range(self.n_metastable, self.partition))

    def with_transform(self, transform: np.ndarray) -> "DvrBasis":
        """Same basis with a different (e.g. sign-flipped) transform."""
        h = transform.T @ np.diag(self.energies) @ transform
        return DvrBasis(self.q_points, transform, self.energies, h, self.partition, self.n_metastable)


def build_dvr(
    sol: EigenSolution,
    m_levels: int | None = None,
    params: pot.PotentialParams | None = None,
    partition: int | None = None,
    n_metastable: int | None = None,
) -> DvrBasis:
    """Build the DVR from the lowest ``m_levels`` eigenstates.

    The well partition comes from the potential geometry when ``params`` is
    given; otherwise pass ``partition`` and ``n_metastable`` explicitly (they
    default to 0, i.e. every state counts as right-well).
    """
    m = sol.n_levels if m_levels is None else m_levels
    if not 1 <= m <= sol.n_levels:
        raise ConfigError(f"m_levels must be in 1..{sol.n_levels}")
    psi = sol.wavefunctions[:, :m]
    x = psi.T @ (sol.q[:, None] * psi) * sol.dx
    x = 0.5 * (x + x.T)
    q_points, u = la.eigh(x)
    order = np.argsort(q_points)
    q_points, u = q_points[order], u[:, order]
    dominant = np.argmax(np.abs(u), axis=0)
    u = u * np.sign(u[dominant, np.arange(m)])

    if q_points[0] < sol.grid.q_min or q_points[-1] > sol.grid.q_max:
        raise TruncationInconsistent("DVR point outside the grid")

    if params is not None:
        geo = pot.geometry(params)
        auto_part = int(np.sum(q_points < geo.q_c))
        auto_meta = int(np.sum(q_points < geo.q_barrier))
    else:
        auto_part = auto_meta = 0
    partition = auto_part if partition is None else partition
    n_metastable = auto_meta if n_metastable is None else n_metastable
    if not 0 <= n_metastable <= partition <= m:
        raise ConfigError("need 0 <= n_metastable <= partition <= m_levels")

    energies = sol.energies[:m].copy()
    h = u.T @ np.diag(energies) @ u
    h = 0.5 * (h + h.T)
    return DvrBasis(q_points, u, energies, h, partition, n_metastable)


def localized_wavefunction(basis: DvrBasis, sol: EigenSolution, mu: int) -> np.ndarray:
    m = basis.size
    return sol.wavefunctions[:, :m] @ basis.transform[:, mu]


def localized_density(basis: DvrBasis, sol: EigenSolution, mu: int) -> np.ndarray:
    """|<x|q_mu>|**2 on the grid, normalized under grid quadrature."""
    if not 0 <= mu < basis.size:
        raise IndexError(mu)
    rho = localized_wavefunction(basis, sol, mu) ** 2
    return rho / (rho.sum() * sol.dx)


def default_initial_state(basis: DvrBasis) -> int:
    """First state right of the barrier top (closest to it)."""
    unstable = basis.unstable_states()
    if not unstable:
        raise ConfigError("no DVR state lies between the barrier top and q_c")
    return unstable[0]
