"""Exception hierarchy shared by all hyporate modules."""


class HyporateError(Exception):
    """Base class for every error raised by this package."""


# linear algebra
class NotHermitian(HyporateError, ValueError):
    pass


class NotPositiveDefinite(HyporateError, ValueError):
    pass


class NoConvergence(HyporateError, RuntimeError):
    pass


# rate machinery
class EmptyFeasibleSet(HyporateError, ValueError):
    pass


class InfeasibleMode(HyporateError, ValueError):
    pass


# Lyapunov certificates
class DefectiveMatrix(HyporateError, ValueError):
    pass


class ZeroEigenvalue(HyporateError, ValueError):
    pass


class FamilyDomainError(HyporateError, ValueError):
    pass


class CertificateViolation(HyporateError):
    def __init__(self, message, residual):
        super().__init__(message)
        self.residual = residual


class DefectiveSigma(HyporateError, ValueError):
    pass


class ThetaOutOfRange(HyporateError, ValueError):
    pass


# decay bounds
class NonMonotoneRate(HyporateError, ValueError):
    pass


class RangeError(HyporateError, ValueError):
    pass


class EpsTooLarge(HyporateError, ValueError):
    pass
