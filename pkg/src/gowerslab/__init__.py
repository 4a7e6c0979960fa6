"""Fourier analysis, Gowers norms and progression counting on Z/NZ, with prime-side tools."""

from .errors import BudgetExceeded, GowersLabError, InputError, InvariantViolation, NoWitnessError
from .kernels import BACKEND
from .zmod import CyclicFn, Spectrum, dft, idft

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BudgetExceeded",
    "CyclicFn",
    "GowersLabError",
    "InputError",
    "InvariantViolation",
    "NoWitnessError",
    "Spectrum",
    "dft",
    "idft",
]
