"""Flying-capacitor converter analysis: steady state, stability, averages."""

from ._core import (
    DomainError,
    InvalidParams,
    IoError,
    NumericalError,
    averages,
    simulate,
    stability,
    steady_state,
    sweep,
)

__all__ = [
    "DomainError",
    "InvalidParams",
    "IoError",
    "NumericalError",
    "averages",
    "simulate",
    "stability",
    "steady_state",
    "sweep",
]
__version__ = "0.1.0"
