"""Markovian rate matrix from the second-order cluster kernel.

For a transition nu -> mu with distance d = q_mu - q_nu and bias
eps = E_nu - E_mu (DVR diagonal energies) the real-time kernel is

    H(tau) = 2 Delta**2 exp(-d**2 Q'(tau)) cos(eps tau - d**2 Q''(tau))

and the rate is its integral over tau in [0, inf). Since Q(-t) = conj(Q(t)),
that integral equals Delta**2 times the Fourier integral of
exp(i eps t - d**2 Q(t)) over the whole real line. Shifting the contour to
t = s - i/(2T) gives

    Gamma = 2 Delta**2 exp(eps / 2T) int_0^inf cos(eps s) exp(-d**2 Q(s - i/2T)) ds

whose integrand is free of the cancellations that make small rates
unresolvable on the real axis, and which satisfies detailed balance
structurally. :func:`kernel` keeps the real-time form for inspection and for
independent checks.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .bath import BathCorrelation, BathParams
from .dvr import DvrBasis
from .errors import QuadratureFailure

log = logging.getLogger(__name__)

GL_ORDER = 20
RTOL = 1e-9
MAX_HALVINGS = 8
MAX_NODES = 4_000_000
ENVELOPE_EXPONENT = 28.0
MIN_HORIZON = 50.0
GNICA_MIN_T = 0.1
STRONG_DAMPING = 1.0

_GL_X, _GL_W = np.polynomial.legendre.leggauss(GL_ORDER)


@dataclass(frozen=True)
class RegimeFlag:
    code: str
    detail: str

    def __str__(self) -> str:
        return f"{self.code}:{self.detail}" if self.detail else self.code


@dataclass(frozen=True)
class RateMatrix:
    """Generator of d rho_mu/dt = sum_nu Gamma[mu, nu] rho_nu.

    Columns sum to zero. ``flags`` lists negative off-diagonal rates, which
    signal that the approximation has been pushed outside its regime.
    """

    gamma_matrix: np.ndarray
    flags: tuple = ()
    bath: BathParams | None = field(default=None, compare=False)

    @property
    def size(self) -> int:
        return self.gamma_matrix.shape[0]

    @cached_property
    def eigenvalues(self) -> np.ndarray:
        """Eigenvalues sorted by decreasing real part (zero mode first)."""
        lam = np.linalg.eigvals(self.gamma_matrix)
        return lam[np.argsort(-lam.real)]

    def stationary(self) -> np.ndarray:
        """Normalized null vector of Gamma."""
        lam, vec = np.linalg.eig(self.gamma_matrix)
        k = np.argmin(np.abs(lam))
        p = np.real(vec[:, k])
        return p / p.sum()


def _pair_data(dvr: DvrBasis):
    e = dvr.dvr_energies
    delta = dvr.couplings
    q = dvr.q_points
    mu, nu = np.nonzero(~np.eye(dvr.size, dtype=bool))
    keep = delta[mu, nu] != 0.0
    mu, nu = mu[keep], nu[keep]
    return mu, nu, (q[mu] - q[nu]) ** 2, e[nu] - e[mu], delta[mu, nu]


def _as_correlation(bath) -> BathCorrelation:
    return bath if isinstance(bath, BathCorrelation) else BathCorrelation(bath)


def kernel(dvr: DvrBasis, bath, mu: int, nu: int, tau):
    """Real-time kernel H_mu_nu(tau) for mu != nu (natural units, omega0**2)."""
    if mu == nu:
        raise ValueError("kernel is defined for mu != nu")
    corr = _as_correlation(bath)
    d2 = (dvr.q_points[mu] - dvr.q_points[nu]) ** 2
    eps = dvr.hamiltonian[nu, nu] - dvr.hamiltonian[mu, mu]
    delta = dvr.hamiltonian[mu, nu]
    tau = np.asarray(tau, dtype=float)
    qr, qi = corr.real(tau), corr.imag(tau)
    return 2.0 * delta**2 * np.exp(-d2 * qr) * np.cos(eps * tau - d2 * qi)


def _composite_gl(s_max: float, width: float):
    n_panels = int(np.ceil(s_max / width))
    lo = np.arange(n_panels) * width
    nodes = (lo[:, None] + 0.5 * width * (_GL_X + 1.0)).ravel()
    weights = np.tile(0.5 * width * _GL_W, n_panels)
    return nodes, weights


def _scaled_integrals(corr, d2, eps, q0, width, s_max):
    nodes, weights = _composite_gl(s_max, width)
    dq = corr.shifted(nodes) - q0
    # (pairs, nodes)
    f = np.cos(np.outer(eps, nodes)) * np.exp(-np.outer(d2, dq))
    return f @ weights, np.abs(f) @ weights


def build_rate_matrix(dvr: DvrBasis, bath) -> RateMatrix:
    """Assemble Gamma for one bath state.

    Off-diagonal integrals use composite Gauss-Legendre panels, halved until
    two successive levels agree to RTOL for every pair.
    """
    corr = _as_correlation(bath)
    params = corr.params
    m = dvr.size
    gamma = np.zeros((m, m))
    mu, nu, d2, eps, delta = _pair_data(dvr)
    if len(mu):
        g, t = params.gamma, params.temperature
        q0 = float(corr.shifted(0.0)[0])
        s_max = max(MIN_HORIZON, ENVELOPE_EXPONENT / (d2.min() * g * t))
        # extend until every envelope has decayed
        while np.any(d2 * (corr.shifted(s_max)[0] - q0) < ENVELOPE_EXPONENT):
            s_max *= 1.5
        width = min(1.0, 0.5 / t, np.pi / max(np.abs(eps).max(), 1e-12))
        prev, _ = _scaled_integrals(corr, d2, eps, q0, width, s_max)
        converged = False
        for _ in range(MAX_HALVINGS):
            width *= 0.5
            if s_max / width * GL_ORDER > MAX_NODES:
                break
            cur, scale = _scaled_integrals(corr, d2, eps, q0, width, s_max)
            if np.all(np.abs(cur - prev) <= RTOL * np.abs(cur) + 1e-15 * scale):
                converged = True
                break
            prev = cur
        if not converged:
            raise QuadratureFailure(f"rate integrals not converged (gamma={g}, T={t})")
        log_pref = np.log(2.0 * delta**2) + eps / (2.0 * t) - d2 * q0
        with np.errstate(under="ignore"):
            gamma[mu, nu] = np.exp(log_pref) * cur
    np.fill_diagonal(gamma, 0.0)
    np.fill_diagonal(gamma, -gamma.sum(axis=0))

    flags = tuple(
        RegimeFlag("negative_rate", f"{i + 1}<-{j + 1}")
        for i, j in zip(*np.nonzero(gamma < 0))
        if i != j
    )
    for fl in flags:
        log.warning("negative off-diagonal rate %s at gamma=%g T=%g", fl.detail, params.gamma, params.temperature)
    return RateMatrix(gamma, flags, params)


@dataclass(frozen=True)
class RegimeReport:
    warnings: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.warnings

    def codes(self) -> tuple[str, ...]:
        return tuple(w.split(":", 1)[0] for w in self.warnings)


def validate_regime(params: BathParams) -> RegimeReport:
    """Advisory check of the (gamma, T) point against the approximation's domain."""
    out = []
    if params.temperature < GNICA_MIN_T:
        out.append(f"low_temperature: T={params.temperature:g} is below the validity estimate T >~ {GNICA_MIN_T}")
    if params.gamma < STRONG_DAMPING:
        out.append(f"weak_damping: gamma={params.gamma:g} is below the moderate-to-strong range gamma >~ 1")
    return RegimeReport(tuple(out))
