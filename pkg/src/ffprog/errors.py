"""Exception hierarchy shared by every ffprog module."""

from __future__ import annotations

from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from .ffcore import AdmissibilityReport


class FFProgError(Exception):
    """Base class for all toolkit failures."""


class NotPrime(FFProgError, ValueError):
    """Raised when a modulus fails the primality test."""

    def __init__(self, p: int) -> None:
        super().__init__(f"{p} is not prime")
        self.p = p


class ZeroDirection(FFProgError, ValueError):
    """Raised when a direction vector (or subspace) vanishes mod p."""


class DegenerateDenominator(FFProgError, ValueError):
    """Raised when a rational function's denominator is identically zero mod p."""


class ArityMismatch(FFProgError, ValueError):
    """Raised when the number of functions or frequencies does not match the system."""


class MissingPhi(FFProgError, ValueError):
    """Raised when a rational-mode operation runs on a system without a rational function."""


class InsufficientLadder(FFProgError, ValueError):
    """Raised when a campaign receives fewer than three usable primes."""


class NonIndependentPolys(FFProgError, ValueError):
    """Raised when the polynomials of a system are linearly dependent over the rationals."""


class EmptySuite(FFProgError, ValueError):
    """Raised when a verification suite would run zero trials."""


class InvalidConfig(FFProgError, ValueError):
    """Raised when a configuration document is malformed."""


class BudgetExceeded(FFProgError, RuntimeError):
    """Raised when an enumeration or kernel would exceed its configured cap."""


class NumericalError(FFProgError, RuntimeError):
    """Raised when a quantity that must be real and non-negative is not, beyond tolerance."""


class Inadmissible(FFProgError, ValueError):
    """Raised when a system is not admissible at the requested prime."""

    def __init__(self, report: AdmissibilityReport) -> None:
        reasons = "; ".join(report.reasons)
        super().__init__(f"system is not admissible at p={report.p}: {reasons}")
        self.report = report


__all__ = [
    "ArityMismatch",
    "BudgetExceeded",
    "DegenerateDenominator",
    "EmptySuite",
    "FFProgError",
    "Inadmissible",
    "InsufficientLadder",
    "InvalidConfig",
    "MissingPhi",
    "NonIndependentPolys",
    "NotPrime",
    "NumericalError",
    "ZeroDirection",
]
