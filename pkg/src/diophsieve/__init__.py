"""Numerical workbench for Diophantine approximation with a prime and an almost-prime."""

from .errors import (
    BudgetExceededError,
    CapacityError,
    ConfigError,
    DiophSieveError,
    DomainError,
    EmptyFeasibleSetError,
    NoSuitableConvergentError,
    PrecisionError,
)
from .limits import DEFAULT_CONSTANTS, F1, F2, SieveConstants, f1
from .params import SieveParams, derive_params

__version__ = "0.1.0"

__all__ = [
    "BudgetExceededError",
    "CapacityError",
    "ConfigError",
    "DiophSieveError",
    "DomainError",
    "EmptyFeasibleSetError",
    "NoSuitableConvergentError",
    "PrecisionError",
    "DEFAULT_CONSTANTS",
    "SieveConstants",
    "F1",
    "F2",
    "f1",
    "SieveParams",
    "derive_params",
]
