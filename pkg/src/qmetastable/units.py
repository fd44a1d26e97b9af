"""Natural units used throughout the package.

Every quantity is measured with hbar = M = omega_0 = k_B = 1, so lengths
are in sqrt(hbar / M omega_0), energies in hbar omega_0, times in 1/omega_0,
the damping in omega_0, the temperature in hbar omega_0 / k_B and the
asymmetry in sqrt(M hbar omega_0^3).

:class:`Quantity` is a thin annotation layer for user-facing output; the
numerical code works on bare floats.
"""

from __future__ import annotations

from dataclasses import dataclass

DIMENSIONS = {
    "length": "sqrt(hbar/(M*omega0))",
    "energy": "hbar*omega0",
    "time": "1/omega0",
    "rate": "omega0",
    "damping": "omega0",
    "frequency": "omega0",
    "temperature": "hbar*omega0/k_B",
    "asymmetry": "sqrt(M*hbar*omega0**3)",
    "inverse_area": "M*omega0/hbar",
    "probability": "1",
}


@dataclass(frozen=True)
class Quantity:
    """A float tagged with the physical dimension it carries."""

    value: float
    dimension: str

    def __post_init__(self):
        if self.dimension not in DIMENSIONS:
            raise ValueError(f"unknown dimension {self.dimension!r}")

    @property
    def unit(self) -> str:
        return DIMENSIONS[self.dimension]

    def __float__(self) -> float:
        return float(self.value)

    def __str__(self) -> str:
        return f"{self.value!r} [{self.unit}]"


def annotate(value: float, dimension: str) -> Quantity:
    return Quantity(float(value), dimension)


def strip(quantity: Quantity | float) -> float:
    """Return the natural-unit number; plain floats pass through."""
    return float(quantity)
