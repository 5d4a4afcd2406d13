"""Exception types shared across the package."""

from __future__ import annotations


class CinfError(Exception):
    """Base class for all package-specific errors."""


class ParseError(CinfError):
    """Raised on malformed input text; carries a character position."""

    def __init__(self, message: str, position: int | None = None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class UnknownName(CinfError):
    """A session/command referenced a name that was never defined."""


class PendingObligation(CinfError):
    """A guarded node (psqrt/pinv) was used while its positivity guard is
    still pending and could not be settled for the evaluation at hand."""


class ObligationViolated(CinfError):
    """A positivity guard is provably violated on the evaluation region."""


class IdealMismatch(CinfError):
    """Arithmetic attempted between cosets over different ideals."""


class PatternMismatch(CinfError):
    """A certificate transform was applied to data of the wrong shape."""


class UnknownVerdict(CinfError):
    """A certificate was requested but the underlying query was undecided."""


class NotInvertibleOnZeroset(CinfError):
    """Invertibility refuted: the witness point is attached."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class OrderRefuted(CinfError):
    """Strict order refuted: the witness point is attached."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class NotEqual(CinfError):
    """Coset equality refuted: the witness point is attached."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class NotASquare(CinfError):
    """Unit-square decomposition refuted: the witness point is attached."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class NotNowhereZero(CinfError):
    """A localization step needed a nowhere-zero denominator and the claim
    was refuted at a point."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class NoSignChange(CinfError):
    """Root localization requires opposite certified signs at the endpoints."""


class RegularityUnknown(CinfError):
    """Root localization could not certify f^2 + f'^2 > 0 on the interval."""


class FilterNotPrime(CinfError):
    """A prime-filter split found both factors outside the filter."""
