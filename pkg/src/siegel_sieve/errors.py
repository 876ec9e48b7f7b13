"""Exception types raised across the package."""


class SiegelSieveError(Exception):
    """Base class for all package errors."""


class InvalidDiscriminant(SiegelSieveError, ValueError):
    pass


class InvalidForm(SiegelSieveError, ValueError):
    pass


class Mismatch(SiegelSieveError, ValueError):
    """Operands carry different discriminants."""


class TooLarge(SiegelSieveError, ValueError):
    pass


class Inconsistent(SiegelSieveError, ValueError):
    """An internal cross-check between two computations failed."""


class WrongKind(SiegelSieveError, ValueError):
    """Operation requires a quadratic (or principal) character."""


class Unstable(SiegelSieveError, ArithmeticError):
    """A truncated series did not settle at the requested cutoff."""


class TooSmall(SiegelSieveError, ValueError):
    pass


class BadWindow(SiegelSieveError, ValueError):
    pass


class HypothesisViolated(SiegelSieveError, ValueError):
    pass


class NonResidueClass(SiegelSieveError, ValueError):
    """The target class has psi(C) = -1."""


class NotFoundBelow(SiegelSieveError, LookupError):
    def __init__(self, bound, message=None):
        self.bound = bound
        super().__init__(message or f"nothing found below {bound}")
