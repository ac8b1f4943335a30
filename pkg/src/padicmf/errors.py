"""Exception hierarchy shared by every module."""

from __future__ import annotations


class PadicMFError(Exception):
    """Base class for all errors raised by padicmf."""


class NegativeValuation(PadicMFError):
    """A rational number is not p-integral."""


class NotCoprime(PadicMFError):
    pass


class NotFundamental(PadicMFError):
    pass


class ModulusSharesFactorWithP(PadicMFError):
    pass


class CharacterNotEmbeddable(PadicMFError):
    """Character values are not (p-1)-st roots of unity in Z/p^prec."""


class ContextMismatch(PadicMFError):
    pass


class NonUnitConstantTerm(PadicMFError):
    pass


class MissingMetadata(PadicMFError):
    pass


class BadPrime(PadicMFError):
    pass


class ParityViolation(PadicMFError):
    pass


class NotPositiveDefinite(PadicMFError):
    pass


class TruncationTooShort(PadicMFError):
    pass


class NotInSpan(PadicMFError):
    """Membership failed; ``valuation`` is the largest e with success mod p^e."""

    def __init__(self, valuation: int, message: str | None = None):
        self.valuation = valuation
        super().__init__(message or f"not in span (residual valuation {valuation})")


class NotStable(PadicMFError):
    pass


class FormatError(PadicMFError):
    pass


class MissingSource(PadicMFError):
    pass


class RankDeficiency(PadicMFError):
    pass


class NoStabilization(PadicMFError):
    pass


class RepeatedResidualEigenvalue(PadicMFError):
    pass


class NonUnitA1(PadicMFError):
    pass


class DenominatorNotUnit(PadicMFError):
    pass


class TwistUndefined(PadicMFError):
    pass
