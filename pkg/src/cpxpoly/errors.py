"""Exception hierarchy shared by all modules."""


class CpxError(Exception):
    """Base class for every error raised by cpxpoly."""


class DependentBasis(CpxError):
    pass


class DomainError(CpxError):
    pass


class Infeasible(CpxError):
    pass


class MaxIterations(CpxError):
    """Solver stopped without convergence; ``report`` holds the best iterate."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class DegeneratePoints(CpxError):
    pass


class RetryExhausted(CpxError):
    pass


class WrongNormKind(CpxError):
    pass


class PrerequisiteFailed(CpxError):
    pass


class PreconditionViolated(CpxError):
    pass


class Unsupported(CpxError):
    pass


class NoCertificate(CpxError):
    pass


class NotRealNorm(CpxError):
    pass


class ParseError(CpxError):
    pass


class ValidationError(CpxError):
    pass


class UnknownCase(CpxError):
    pass
