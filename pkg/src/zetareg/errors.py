"""Exception hierarchy shared by all zetareg modules."""


class ZetaRegError(Exception):
    """Base class for every error raised by zetareg."""


# ffield
class NotPrime(ZetaRegError, ValueError):
    pass


class DivisionByZero(ZetaRegError, ZeroDivisionError):
    pass


class FieldMismatch(ZetaRegError, ValueError):
    pass


class BudgetExceeded(ZetaRegError):
    pass


# geometry
class NonHomogeneous(ZetaRegError, ValueError):
    pass


class InexactQuotient(ZetaRegError, ArithmeticError):
    pass


class NegativeCensus(ZetaRegError, ArithmeticError):
    pass


class InvalidSpec(ZetaRegError, ValueError):
    pass


# zeta
class NonIntegralSeries(ZetaRegError, ArithmeticError):
    pass


class NotStabilized(ZetaRegError):
    pass


class InsufficientOrder(ZetaRegError, ValueError):
    pass


class ZeroFunction(ZetaRegError, ValueError):
    pass


class ZeroInput(ZetaRegError, ValueError):
    pass


# abgroup
class NotFQ(ZetaRegError):
    """A kernel or cokernel has positive free rank, so chi is undefined."""


class InvalidMap(ZetaRegError, ValueError):
    pass


class RowsNotExact(ZetaRegError):
    pass


class NotAComplex(ZetaRegError):
    pass


class HypothesisViolated(ZetaRegError):
    pass


# weight
class IncoherentIncidence(ZetaRegError, ValueError):
    pass


class BoundednessViolated(ZetaRegError, ValueError):
    pass


class NotExact(ZetaRegError):
    def __init__(self, message, degree=None):
        super().__init__(message)
        self.degree = degree


class SignIncoherent(ZetaRegError, ValueError):
    pass


# chowcat
class IncompleteBase(ZetaRegError):
    pass


class NonIntegralP1(ZetaRegError, ValueError):
    pass


class IncompleteProfile(ZetaRegError):
    pass


# cli
class ParseError(ZetaRegError, ValueError):
    def __init__(self, message, location=None):
        if location:
            message = f"{location}: {message}"
        super().__init__(message)
        self.location = location
