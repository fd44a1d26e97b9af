"""Asymmetric quartic double well.

    V(q) = q**4 / (64 dU) - q**2 / 4 - eps * q

in natural units. ``dU`` is the barrier height of the symmetric well and
``eps`` tilts the right well down, so the left well is the metastable one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DegeneratePotential


@dataclass(frozen=True)
class PotentialParams:
    """Shape of the double well.

    Parameters
    ----------
    barrier_height : float
        Barrier height of the unbiased well, in hbar*omega0.
    asymmetry : float
        Linear tilt, in sqrt(M*hbar*omega0**3). Must be non-negative.
    """

    barrier_height: float
    asymmetry: float = 0.0

    def __post_init__(self):
        if not self.barrier_height > 0:
            raise ConfigError("barrier_height must be positive")
        if not self.asymmetry >= 0:
            raise ConfigError("asymmetry must be non-negative")

    @property
    def quartic(self) -> float:
        return 1.0 / (64.0 * self.barrier_height)

    @property
    def max_asymmetry(self) -> float:
        """Largest tilt that still leaves two minima."""
        return math.sqrt(8.0 * self.barrier_height / 27.0)

    def has_two_minima(self) -> bool:
        return self.asymmetry < self.max_asymmetry


def evaluate(params: PotentialParams, q):
    q = np.asarray(q, dtype=float)
    return params.quartic * q**4 - 0.25 * q**2 - params.asymmetry * q


def derivative(params: PotentialParams, q):
    q = np.asarray(q, dtype=float)
    return q**3 / (16.0 * params.barrier_height) - 0.5 * q - params.asymmetry


def second_derivative(params: PotentialParams, q):
    q = np.asarray(q, dtype=float)
    return 3.0 * q**2 / (16.0 * params.barrier_height) - 0.5


@dataclass(frozen=True)
class PotentialGeometry:
    """Landmarks of the well, all positions in natural length units.

    ``q_c`` is the right inflection point, the edge of the barrier region on
    the stable side. DVR states in ``(q_barrier, q_c)`` are the unstable
    initial conditions; states beyond ``q_c`` belong to the stable well.
    ``q_exit`` is the classical exit point, where V climbs back to the
    barrier-top energy on the far right.
    """

    q_left_min: float
    q_barrier: float
    q_right_min: float
    q_c: float
    q_exit: float
    q_left_turn: float
    v_left_min: float
    v_barrier: float
    v_right_min: float
    v_c: float

    @property
    def q_b(self) -> float:
        return self.q_barrier


def _stationary_points(params: PotentialParams) -> np.ndarray:
    # q**3 + p q + r = 0 with p = -8 dU, r = -16 dU eps
    du, eps = params.barrier_height, params.asymmetry
    p, r = -8.0 * du, -16.0 * du * eps
    m = 2.0 * math.sqrt(-p / 3.0)
    arg = (3.0 * r / (2.0 * p)) * math.sqrt(-3.0 / p)
    theta = math.acos(max(-1.0, min(1.0, arg))) / 3.0
    roots = np.array([m * math.cos(theta - 2.0 * math.pi * k / 3.0) for k in range(3)])
    roots.sort()
    # one Newton polish on V'(q) * 16 dU
    f = roots**3 + p * roots + r
    fp = 3.0 * roots**2 + p
    return roots - f / fp


def _level_crossing(params: PotentialParams, level: float, lo: float, step: float) -> float:
    """Solve V(q) = level outward from ``lo`` where V(lo) < level."""
    from scipy.optimize import brentq

    hi = lo + step
    while evaluate(params, hi) < level:
        hi += step
    a, b = sorted((lo, hi))
    return brentq(lambda q: evaluate(params, q) - level, a, b, xtol=1e-14, rtol=1e-15)


def geometry(params: PotentialParams) -> PotentialGeometry:
    if not params.has_two_minima():
        raise DegeneratePotential(
            f"asymmetry {params.asymmetry} >= {params.max_asymmetry:.6g}: single minimum"
        )
    q_left, q_bar, q_right = (float(x) for x in _stationary_points(params))
    v_bar = float(evaluate(params, q_bar))
    q_c = math.sqrt(8.0 * params.barrier_height / 3.0)
    q_exit = _level_crossing(params, v_bar, q_right, 1.0)
    q_left_turn = _level_crossing(params, v_bar, q_left, -1.0)
    return PotentialGeometry(
        q_left_min=q_left,
        q_barrier=q_bar,
        q_right_min=q_right,
        q_c=q_c,
        q_exit=q_exit,
        q_left_turn=q_left_turn,
        v_left_min=float(evaluate(params, q_left)),
        v_barrier=v_bar,
        v_right_min=float(evaluate(params, q_right)),
        v_c=float(evaluate(params, q_c)),
    )
