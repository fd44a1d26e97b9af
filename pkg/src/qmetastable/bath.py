"""Ohmic heat bath with exponential cutoff.

Spectral density ``J(w) = gamma * w * exp(-w / omega_c)`` and the twice
integrated bath correlation function

    Q(t) = (1/pi) int_0^inf dw J(w)/w**2 [coth(w/2T)(1 - cos wt) + i sin wt]

(hbar = M = 1, so Q carries units of 1/length**2). Q is linear in gamma, so
all numerical work is done for gamma = 1 and cached per (T, omega_c).

Rates are assembled on the line t = s - i/(2T) in the complex time plane,
where the correlation function is real and even:

    Q(s - i/2T) = (1/pi) int dw J(w)/w**2 [coth(w/2T) - cos(ws)/sinh(w/2T)]

:meth:`BathCorrelation.shifted` evaluates this by adaptive quadrature on a
piecewise Chebyshev table. A gamma-function closed form is kept only for
cross-checks.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import chebyshev as cheb
from scipy.integrate import quad
from scipy.special import loggamma

from .errors import ConfigError, QuadratureFailure

MIN_CUTOFF = 20.0
DEFAULT_CUTOFF = 50.0
EVAL_BUDGET = 10**6
EPSABS = 1e-11
EPSREL = 1e-12
WEIGHTED_EPS = 1e-10


@dataclass(frozen=True)
class BathParams:
    """Damping ``gamma`` (omega0), temperature (hbar omega0/k_B), cutoff (omega0)."""

    gamma: float
    temperature: float
    omega_c: float = DEFAULT_CUTOFF

    def __post_init__(self):
        if not self.gamma > 0:
            raise ConfigError("gamma must be positive")
        if not self.temperature > 0:
            raise ConfigError("temperature must be positive")
        if not self.omega_c >= MIN_CUTOFF:
            raise ConfigError(f"omega_c must be >= {MIN_CUTOFF}")

    @property
    def beta(self) -> float:
        return 1.0 / self.temperature


def spectral_density(params: BathParams, omega):
    omega = np.asarray(omega, dtype=float)
    return params.gamma * omega * np.exp(-omega / params.omega_c)


def _quad(f, a, b, **kw):
    """scipy quad with a hard evaluation budget; failures raise."""
    weighted = "weight" in kw
    if weighted and math.isinf(b):
        kw.setdefault("limlst", 200)
        kw.setdefault("limit", 2000)
    else:
        kw.setdefault("limit", EVAL_BUDGET // 21)
    # QUADPACK's Fourier-weighted rules can return wrong values with a tiny
    # error estimate when asked for less than ~1e-11, so they get WEIGHTED_EPS
    kw.setdefault("epsabs", WEIGHTED_EPS if weighted else EPSABS)
    kw.setdefault("epsrel", WEIGHTED_EPS if weighted else EPSREL)
    value = _quad_once(f, a, b, kw)
    if weighted:
        loose = dict(kw, epsabs=10.0 * kw["epsabs"], epsrel=10.0 * kw["epsrel"])
        check = _quad_once(f, a, b, loose)
        if abs(check - value) > 100.0 * max(kw["epsabs"], kw["epsrel"] * abs(value)):
            raise QuadratureFailure(f"weighted quadrature on [{a}, {b}] is unstable: {value} vs {check}")
    return value


def _quad_once(f, a, b, kw):
    out = quad(f, a, b, full_output=1, **kw)
    value, err, info = out[0], out[1], out[2]
    if not (math.isfinite(value) and math.isfinite(err)):
        raise QuadratureFailure(f"quadrature on [{a}, {b}] returned {value} +- {err}")
    neval = info.get("neval", 0) if isinstance(info, dict) else 0
    if neval > EVAL_BUDGET:
        raise QuadratureFailure(f"quadrature used {neval} evaluations on [{a}, {b}]")
    # a 4th element is QUADPACK's warning message; accept only if the
    # reported error still meets the tolerance by a safety margin of 10
    if len(out) > 3 and err > 10.0 * max(kw["epsabs"], kw["epsrel"] * abs(value)):
        raise QuadratureFailure(f"quadrature on [{a}, {b}] failed: {out[3]} (err={err:.3g})")
    return value


def _inv_sinh(x: float) -> float:
    # 1/sinh(x) without overflow
    e = math.exp(-x)
    return 2.0 * e / -math.expm1(-2.0 * x)


class _UnitCorrelation:
    """Q(t) for gamma = 1 at fixed (T, omega_c), with memoization."""

    HEAD_PANELS_PER_BETA = 2
    HEAD_DEGREE = 23
    TAIL_DEGREE = 15
    LINEAR_AFTER = 8.0  # s_lin = LINEAR_AFTER / T

    def __init__(self, temperature: float, omega_c: float):
        self.T = float(temperature)
        self.wc = float(omega_c)
        self._real_memo: dict[float, float] = {}
        self._shift_memo: dict[float, float] = {}
        self._lock = threading.Lock()
        self._base: float | None = None
        self.s_lin = self.LINEAR_AFTER / self.T
        self.head_width = 1.0 / (self.HEAD_PANELS_PER_BETA * self.T)
        self.n_head = int(math.ceil(self.s_lin / self.head_width))
        self.s_lin = self.n_head * self.head_width
        self._head: list[np.ndarray] = []
        self._tail: dict[int, np.ndarray] = {}

    # real time -------------------------------------------------------------

    def real(self, t: float) -> float:
        t = abs(float(t))
        if t == 0.0:
            return 0.0
        hit = self._real_memo.get(t)
        if hit is None:
            hit = self._real_quadrature(t)
            self._real_memo[t] = hit
        return hit

    def _real_quadrature(self, t: float) -> float:
        T, wc = self.T, self.wc

        def direct(w):
            if w == 0.0:
                return T * t * t
            return math.exp(-w / wc) * 2.0 * math.sin(0.5 * w * t) ** 2 / (w * math.tanh(0.5 * w / T))

        def envelope(w):
            return math.exp(-w / wc) / (w * math.tanh(0.5 * w / T))

        a = 1.0 / t
        if a >= 60.0 * wc:
            total = _quad(direct, 0.0, wc) + _quad(direct, wc, math.inf)
        elif a >= wc:
            total = _quad(direct, 0.0, wc) + _quad(direct, wc, a) + self._split(envelope, a, math.inf, t)
        else:
            total = _quad(direct, 0.0, a) + self._split(envelope, a, wc, t) + self._split(envelope, wc, math.inf, t)
        return total / math.pi

    @staticmethod
    def _split(h, a, b, t):
        """int_a^b h(w) (1 - cos wt) dw for smooth, decaying h."""
        return _quad(h, a, b) - _quad(h, a, b, weight="cos", wvar=t)

    def imag(self, t):
        return np.arctan(self.wc * np.asarray(t, dtype=float)) / np.pi

    def imag_quadrature(self, t: float) -> float:
        t = float(t)
        if t == 0.0:
            return 0.0
        sign = math.copysign(1.0, t)
        t = abs(t)
        wc = self.wc

        def direct(w):
            return math.exp(-w / wc) * (t if w == 0.0 else math.sin(w * t) / w)

        a = 1.0 / t
        head = _quad(direct, 0.0, a)
        tail = _quad(lambda w: math.exp(-w / wc) / w, a, math.inf, weight="sin", wvar=t)
        return sign * (head + tail) / math.pi

    # shifted time ----------------------------------------------------------

    def base(self) -> float:
        """Q(-i/2T) for gamma = 1."""
        if self._base is None:
            T, wc = self.T, self.wc

            def f(w):
                if w == 0.0:
                    return 0.25 / T
                return math.exp(-w / wc) * math.tanh(0.25 * w / T) / w

            self._base = (_quad(f, 0.0, wc) + _quad(f, wc, math.inf)) / math.pi
        return self._base

    def shifted_quadrature(self, s: float) -> float:
        """Q(s - i/2T) for gamma = 1 by direct adaptive quadrature."""
        s = abs(float(s))
        hit = self._shift_memo.get(s)
        if hit is not None:
            return hit
        T, wc = self.T, self.wc

        def direct(w):
            if w == 0.0:
                return T * s * s
            return math.exp(-w / wc) * 2.0 * math.sin(0.5 * w * s) ** 2 * _inv_sinh(0.5 * w / T) / w

        def envelope(w):
            return math.exp(-w / wc) * _inv_sinh(0.5 * w / T) / w

        w_eff = 80.0 * T
        if s == 0.0:
            osc = 0.0
        elif s * w_eff < 50.0:
            osc = _quad(direct, 0.0, w_eff) + _quad(direct, w_eff, math.inf)
        else:
            a = 1.0 / s
            # the integrand decays like exp(-w/2T); stop where it is below 1e-26.
            # Octave-wide pieces keep the 1/w**2 envelope smooth on each one.
            edges = np.append(a * 2.0 ** np.arange(0, int(math.log2(120.0 * T * s)) + 1), a + 120.0 * T)
            osc = _quad(direct, 0.0, a) + sum(self._split(envelope, lo, hi, s) for lo, hi in zip(edges[:-1], edges[1:]))
        value = self.base() + osc / math.pi
        self._shift_memo[s] = value
        return value

    def _head_panel(self, k: int) -> np.ndarray:
        while len(self._head) <= k:
            j = len(self._head)
            lo, hi = j * self.head_width, (j + 1) * self.head_width
            coef = cheb.chebinterpolate(
                lambda x: np.array([self.shifted_quadrature(0.5 * (hi - lo) * xi + 0.5 * (hi + lo)) for xi in x]),
                self.HEAD_DEGREE,
            )
            self._head.append(coef)
        return self._head[k]

    def _tail_panel(self, k: int) -> np.ndarray:
        coef = self._tail.get(k)
        if coef is None:
            lo = math.log(self.s_lin) + k * math.log(2.0)
            hi = lo + math.log(2.0)

            def remainder(x):
                s = np.exp(0.5 * (hi - lo) * x + 0.5 * (hi + lo))
                return np.array([self.shifted_quadrature(si) - self.T * si for si in s])

            coef = cheb.chebinterpolate(remainder, self.TAIL_DEGREE)
            self._tail[k] = coef
        return coef

    def shifted(self, s) -> np.ndarray:
        """Interpolated Q(s - i/2T), gamma = 1, vectorized over ``s``."""
        s = np.abs(np.atleast_1d(np.asarray(s, dtype=float)))
        out = np.empty_like(s)
        head = s < self.s_lin
        with self._lock:
            if np.any(head):
                idx = np.minimum((s[head] / self.head_width).astype(int), self.n_head - 1)
                sh = s[head]
                vals = np.empty_like(sh)
                for k in np.unique(idx):
                    m = idx == k
                    lo = k * self.head_width
                    x = 2.0 * (sh[m] - lo) / self.head_width - 1.0
                    vals[m] = cheb.chebval(x, self._head_panel(int(k)))
                out[head] = vals
            tail = ~head
            if np.any(tail):
                st = s[tail]
                u = np.log(st / self.s_lin) / math.log(2.0)
                idx = np.floor(u).astype(int)
                vals = np.empty_like(st)
                for k in np.unique(idx):
                    m = idx == k
                    x = 2.0 * (u[m] - k) - 1.0
                    vals[m] = cheb.chebval(x, self._tail_panel(int(k))) + self.T * st[m]
                out[tail] = vals
        return out

    # closed form (cross-check only) -----------------------------------------

    def closed_form(self, t):
        """Q(t) for complex t with -1/T < Im t <= 0, via log-gamma functions."""
        t = np.asarray(t, dtype=complex)
        kappa = self.T / self.wc
        z = (
            np.log(1.0 + 1j * self.wc * t)
            + 2.0 * loggamma(1.0 + kappa)
            - loggamma(1.0 + kappa + 1j * self.T * t)
            - loggamma(1.0 + kappa - 1j * self.T * t)
        )
        return z / np.pi


@lru_cache(maxsize=64)
def _unit_correlation(temperature: float, omega_c: float) -> _UnitCorrelation:
    return _UnitCorrelation(temperature, omega_c)


class BathCorrelation:
    """Evaluator for Q(t) = Q'(t) + i Q''(t) of an Ohmic bath.

    Instances for equal (T, omega_c) share one memo table, so building many
    evaluators across a damping sweep is cheap.
    """

    def __init__(self, params: BathParams):
        self.params = params
        self._unit = _unit_correlation(float(params.temperature), float(params.omega_c))

    @property
    def gamma(self) -> float:
        return self.params.gamma

    def spectral_density(self, omega):
        return spectral_density(self.params, omega)

    def real(self, t):
        """Q'(t) by adaptive quadrature."""
        if np.ndim(t) == 0:
            return self.gamma * self._unit.real(t)
        return self.gamma * np.array([self._unit.real(ti) for ti in np.ravel(t)]).reshape(np.shape(t))

    def imag(self, t):
        """Q''(t) = (gamma/pi) arctan(omega_c t)."""
        return self.gamma * self._unit.imag(t)

    def imag_by_quadrature(self, t: float) -> float:
        return self.gamma * self._unit.imag_quadrature(t)

    def __call__(self, t):
        return self.real(t) + 1j * self.imag(t)

    def shifted(self, s) -> np.ndarray:
        """Q(s - i/2T), real and even in s."""
        return self.gamma * self._unit.shifted(s)

    def shifted_by_quadrature(self, s: float) -> float:
        return self.gamma * self._unit.shifted_quadrature(s)

    def closed_form(self, t):
        return self.gamma * self._unit.closed_form(t)


def correlation(params: BathParams, t):
    return BathCorrelation(params)(t)
