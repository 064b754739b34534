"""Exception types raised across the package."""


class TenrankError(Exception):
    """Base class for all library errors."""


class DivisionByZero(TenrankError, ZeroDivisionError):
    pass


class ZeroPolynomial(TenrankError, ValueError):
    pass


class ScalarParseError(TenrankError, ValueError):
    pass


class IndexOutOfShape(TenrankError, IndexError):
    pass


class ScalarKindMismatch(TenrankError, TypeError):
    pass


class ArityMismatch(TenrankError, ValueError):
    pass


class DimMismatch(TenrankError, ValueError):
    pass


class ShapeMismatch(TenrankError, ValueError):
    pass


class ZeroTensor(TenrankError, ValueError):
    pass


class BadSpec(TenrankError, ValueError):
    pass


class BadDim(BadSpec):
    pass


class BadParams(BadSpec):
    pass


class NotApplicable(TenrankError):
    """A sufficient condition does not apply to the given tensor."""


class UnsupportedArity(TenrankError, ValueError):
    pass


class WeakCertificate(TenrankError, ValueError):
    pass


class NotBlockPyramidal(TenrankError, ValueError):
    pass


class CertificateSubjectMismatch(TenrankError, ValueError):
    pass


class NotMinimalRank(TenrankError, ValueError):
    pass


class RearrangementFailed(TenrankError, RuntimeError):
    pass


class NotADegeneration(TenrankError, ValueError):
    pass


class InvalidEpsDecomposition(TenrankError, ValueError):
    pass


class UnverifiedDecomposition(TenrankError, ValueError):
    pass


class ArityCapExceeded(TenrankError, ValueError):
    pass
