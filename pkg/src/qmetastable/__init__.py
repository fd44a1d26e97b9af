"""Escape from a quantum metastable state in a damped asymmetric double well.

The pipeline is potential -> spectrum -> DVR -> bath correlation -> rate
matrix -> population dynamics -> escape time, with :mod:`qmetastable.sweep`
running grids over damping and temperature.

Natural units are used throughout: hbar = M = omega_0 = k_B = 1. Energies
and temperatures are in hbar*omega_0, times in 1/omega_0, lengths in
sqrt(hbar/(M omega_0)), and the damping gamma in omega_0.
"""

from .bath import BathCorrelation, BathParams, correlation, spectral_density
from .dvr import DvrBasis, build_dvr, default_initial_state, localized_density
from .dynamics import EscapeResult, basis_state, escape_time, evolve, relaxation_time, right_population
from .errors import (
    ConfigError,
    DegeneratePotential,
    DegenerateSpectrum,
    GridTooCoarse,
    IllConditionedGenerator,
    InsufficientResolution,
    NumericalError,
    QMetastableError,
    QuadratureFailure,
    TruncationInconsistent,
)
from .potential import PotentialParams, geometry
from .rates import RateMatrix, build_rate_matrix, kernel, validate_regime
from .spectrum import EigenSolution, GridConfig, solve_spectrum, splittings
from .sweep import SweepConfig, SweepRecord, detect_features, emit_outputs, load_config, run_sweep

__version__ = "0.1.0"

__all__ = [
    "BathCorrelation",
    "BathParams",
    "ConfigError",
    "DegeneratePotential",
    "DegenerateSpectrum",
    "DvrBasis",
    "EigenSolution",
    "EscapeResult",
    "GridConfig",
    "GridTooCoarse",
    "IllConditionedGenerator",
    "InsufficientResolution",
    "NumericalError",
    "PotentialParams",
    "QMetastableError",
    "QuadratureFailure",
    "RateMatrix",
    "SweepConfig",
    "SweepRecord",
    "TruncationInconsistent",
    "basis_state",
    "build_dvr",
    "build_rate_matrix",
    "correlation",
    "default_initial_state",
    "detect_features",
    "emit_outputs",
    "escape_time",
    "evolve",
    "geometry",
    "kernel",
    "load_config",
    "localized_density",
    "relaxation_time",
    "right_population",
    "run_sweep",
    "solve_spectrum",
    "spectral_density",
    "splittings",
    "validate_regime",
]
