"""Analysis and synthesis of a combined readout-resonator / Purcell notch filter."""

from purcell_notch.errors import (
    ConfigError,
    ConvergenceError,
    DomainError,
    InfeasibleError,
    PassivityError,
    SearchError,
    SingularityError,
)

__all__ = [
    "ConfigError",
    "ConvergenceError",
    "DomainError",
    "InfeasibleError",
    "PassivityError",
    "SearchError",
    "SingularityError",
]

__version__ = "0.1.0"
