"""Exception types raised by the library."""

from __future__ import annotations


class DnlwError(Exception):
    """Base class for all library errors."""


class DomainError(DnlwError, ValueError):
    """Parameters or inputs outside the supported mathematical domain."""


class BracketError(DnlwError):
    """Both ends of a speed bracket classify identically."""


class StepFailure(DnlwError):
    """The ODE integrator could not take a step."""


class AnchorError(DnlwError, ValueError):
    """Requested anchor value lies outside the sampled range."""


class WindowError(DnlwError):
    """Too few samples inside a fitting window."""


class DeltaTooSmall(DnlwError):
    """No change-sign wave exists for the requested peak offset."""


class SpeedTooLow(DnlwError):
    """The requested speed lies below the critical speed."""


class TailTooShort(DnlwError):
    """The profile does not extend far enough into its tail."""


class CFLError(DnlwError):
    """Time step exceeds the explicit stability bound."""


class GridTooSmall(DnlwError):
    """An initial datum does not fit on the grid."""


class InsufficientData(DnlwError):
    """Too few samples to fit a speed."""
