"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class AbsumsError(Exception):
    """Base class for all errors raised by this package."""


class NotPrime(AbsumsError, ValueError):
    pass


class NoIrreducibleFound(AbsumsError, RuntimeError):
    pass


class NoRootFound(AbsumsError, RuntimeError):
    pass


class FieldMismatch(AbsumsError, TypeError):
    """Arithmetic between elements of different fields."""


class EmptyInput(AbsumsError, ValueError):
    pass


class ReconstructionUnstable(AbsumsError, ArithmeticError):
    pass


class ValuationOverflow(AbsumsError, RuntimeError):
    """pi-adic valuation exceeded its sanity cap on a nonzero input."""


class DegreeViolation(AbsumsError, ValueError):
    pass


class EmptyF(AbsumsError, ValueError):
    pass


class ZeroT0(AbsumsError, ZeroDivisionError):
    pass


class PolytopeMismatch(AbsumsError, ValueError):
    pass


class ZeroLeadingPB(AbsumsError, ValueError):
    pass


class SingularMatrix(AbsumsError, ValueError):
    pass


class SamplingExhausted(AbsumsError, RuntimeError):
    pass


class RegimeViolation(AbsumsError, ValueError):
    pass


class NegativeHodgeNumber(AbsumsError, RuntimeError):
    pass


class UnsupportedAB(AbsumsError, ValueError):
    pass


class BudgetExceeded(AbsumsError, RuntimeError):
    pass


class NotPolynomial(AbsumsError, ArithmeticError):
    pass


class NonIntegral(AbsumsError, ArithmeticError):
    pass


class RootFindingFailed(AbsumsError, RuntimeError):
    pass


class HypothesisUnmet(AbsumsError, ValueError):
    """A theorem's hypothesis does not hold; ``clause`` names the failed condition."""

    def __init__(self, clause: str):
        super().__init__(clause)
        self.clause = clause


class DegreeMismatch(AbsumsError, ValueError):
    pass


class InstanceFormatError(AbsumsError, ValueError):
    pass
