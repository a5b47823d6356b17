"""Named error types raised across the package.

Every rejection carries the violation name in the exception class itself so
CLI output and logs stay grep-able.
"""

from __future__ import annotations


class FractaxError(Exception):
    """Base class for all package errors."""


# -- parameter validation ---------------------------------------------------

class AlphaOutOfRange(FractaxError):
    pass


class GammaOutOfRange(FractaxError):
    pass


class KOutOfRange(FractaxError):
    pass


class NonPositiveLambda(FractaxError):
    pass


class NonPositiveMu(FractaxError):
    pass


class NegativeChi(FractaxError):
    pass


class DimOutOfRange(FractaxError):
    pass


# -- coefficient fields and grids -------------------------------------------

class NonPositiveInfimum(FractaxError):
    pass


class GridSpecError(FractaxError):
    pass


class ConfigError(FractaxError):
    pass


# -- spectral operators ------------------------------------------------------

class NegativeTime(FractaxError):
    pass


class TailTooFat(FractaxError):
    pass


class KernelPositivityViolated(FractaxError):
    pass


# -- signal solves ------------------------------------------------------------

class NegativeInput(FractaxError):
    pass


# -- time integration ---------------------------------------------------------

class NonFinite(FractaxError):
    pass


class NonFiniteTendency(NonFinite):
    pass


class PositivityBreach(FractaxError):
    pass


class ClampBudgetExceeded(PositivityBreach):
    pass


class BlowUpSuspected(FractaxError):
    """sup u crossed the blow-up threshold; carries the partial trajectory."""

    def __init__(self, message, trajectory=None):
        super().__init__(message)
        self.trajectory = trajectory


# -- regime algebra -----------------------------------------------------------

class CaseCHypothesisViolated(FractaxError):
    pass


class BandHypothesesUnmet(FractaxError):
    pass


# -- diagnostics and quadrature ------------------------------------------------

class WindowTooShort(FractaxError):
    pass


class RadiusTooLarge(FractaxError):
    pass


class QuadratureUnstable(FractaxError):
    pass
