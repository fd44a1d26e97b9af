"""Independent reference computations used only by the tests.

Nothing here imports the numerical internals of the package: the bath
correlation is rebuilt from its gamma-function closed form and rates are
integrated on the real time axis with scipy's adaptive quadrature.
"""

import numpy as np
from scipy.integrate import quad
from scipy.special import loggamma


def ohmic_q(t, gamma, temperature, omega_c):
    """Q(t) for J = gamma w exp(-w/omega_c), complex t allowed."""
    t = np.asarray(t, dtype=complex)
    k = temperature / omega_c
    z = (
        np.log(1.0 + 1j * omega_c * t)
        + 2.0 * loggamma(1.0 + k)
        - loggamma(1.0 + k + 1j * temperature * t)
        - loggamma(1.0 + k - 1j * temperature * t)
    )
    return gamma * z / np.pi


def ohmic_q_real_quad(t, gamma, temperature, omega_c):
    """Re Q(t) by direct quadrature over frequencies (slow, moderate accuracy)."""

    def f(w):
        return np.exp(-w / omega_c) / w / np.tanh(w / (2 * temperature)) * (1 - np.cos(w * t))

    edges = [0.0, 1.0 / max(t, 1e-300), omega_c, 40.0 * omega_c]
    edges = sorted(set(edges))
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        total += quad(f, a, b, limit=20000, epsabs=1e-13, epsrel=1e-12)[0]
    return gamma * total / np.pi


def real_time_rate(delta, d2, eps, gamma, temperature, omega_c, t_max=None):
    """Integral over [0, inf) of 2 delta^2 exp(-d2 Q') cos(eps t - d2 Q'')."""

    def h(t):
        q = ohmic_q(t, gamma, temperature, omega_c)
        return 2.0 * delta**2 * np.exp(-d2 * q.real) * np.cos(eps * t - d2 * q.imag)

    if t_max is None:
        t_max = 40.0 / (d2 * gamma * temperature)
    width = min(1.0, np.pi / max(abs(eps), 1e-3))
    edges = np.concatenate([[0.0, 0.02, 0.1, 0.5], np.arange(1.0, t_max + width, width)])
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        total += quad(h, a, b, limit=200, epsabs=1e-15, epsrel=1e-11)[0]
    return total


def two_state_populations(k_forward, k_backward, t):
    """Closed-form populations of 0 <-> 1 starting in state 0."""
    k = k_forward + k_backward
    p1 = k_forward / k * (1.0 - np.exp(-k * np.asarray(t)))
    return 1.0 - p1, p1
