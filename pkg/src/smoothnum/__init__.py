"""Exact counts and desk-scale experiments for integers whose prime factors lie in
a window [y', y]."""

__version__ = "0.1.0"

from .config import DEFAULT_CONSTANTS, Constants  # noqa: E402
from .errors import CapacityError, DomainError, HypothesisViolation, SmoothnumError  # noqa: E402
from .sieve import SmoothWindow, psi, psi_character, psi_progression, residue_counts  # noqa: E402
from .saddle import brt_estimate, ht_estimate, solve_alpha  # noqa: E402
from .weyl import weyl_sum  # noqa: E402

__all__ = [
    "__version__", "Constants", "DEFAULT_CONSTANTS", "SmoothnumError", "DomainError",
    "HypothesisViolation", "CapacityError", "SmoothWindow", "psi", "psi_progression",
    "psi_character", "residue_counts", "solve_alpha", "ht_estimate", "brt_estimate", "weyl_sum",
]
