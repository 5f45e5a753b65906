"""Exception hierarchy shared by all fracphase modules."""

from __future__ import annotations


class FracPhaseError(Exception):
    """Base class for every error raised by this package."""


class GridMismatch(FracPhaseError, ValueError):
    pass


class NonZeroMean(FracPhaseError, ValueError):
    pass


class NonPositiveEntry(FracPhaseError, ValueError):
    pass


class PropertyViolation(FracPhaseError, ValueError):
    pass


class PivotFailure(FracPhaseError, ArithmeticError):
    pass


class DomainViolation(FracPhaseError, ValueError):
    pass


class DiagonalSingularity(FracPhaseError, ValueError):
    pass


class LengthMismatch(FracPhaseError, ValueError):
    pass


class OutOfRange(FracPhaseError, ValueError):
    pass


class NonNormalized(FracPhaseError, ValueError):
    pass


class NegativeWeight(FracPhaseError, ValueError):
    pass


class ConfigError(FracPhaseError, ValueError):
    pass


class BlowUp(FracPhaseError, ArithmeticError):
    """The phase field left the region ``max|phi| <= 10`` (or became non-finite)."""

    def __init__(self, step: int, max_abs: float) -> None:
        super().__init__(f"solution blew up at step {step} (max|phi| = {max_abs:.3g})")
        self.step = step
        self.max_abs = max_abs
