"""Exception hierarchy shared by all modules.

Every class derives from WKIError so callers (the CLI in particular) can map
families of failures onto exit codes without enumerating them.
"""
from __future__ import annotations


class WKIError(Exception):
    """Base class for toolkit errors."""


class InputError(WKIError, ValueError):
    """Invalid user-supplied data (exit code 2 in the CLI)."""


class NumericalAbort(WKIError, ArithmeticError):
    """A computation could not reach its accuracy target (exit code 3)."""


# numerics
class PoleError(NumericalAbort):
    pass


class ConvergenceError(NumericalAbort):
    pass


class TruncationError(NumericalAbort):
    pass


class OnCutError(NumericalAbort):
    pass


# scattering
class RangeError(InputError):
    pass


class StepFailure(NumericalAbort):
    pass


class SingularProfile(NumericalAbort):
    pass


class SpectralSingularity(NumericalAbort):
    pass


class DegenerateZero(NumericalAbort):
    pass


class CountMismatch(NumericalAbort):
    pass


class NotProportional(NumericalAbort):
    pass


# soliton
class SingularSystem(NumericalAbort):
    pass


class FixedPointDivergence(NumericalAbort):
    def __init__(self, message: str, where: float | None = None):
        super().__init__(message)
        self.where = where


# asymptotics
class ZeroTime(InputError):
    pass


class AtPoleError(NumericalAbort):
    pass


class IntegrableSingularity(NumericalAbort):
    pass


class StationaryAtZero(NumericalAbort):
    pass


# oracle
class BlowUp(NumericalAbort):
    pass


class StabilityViolation(InputError):
    pass


# cli
class GridMismatch(InputError):
    pass
