"""Exception hierarchy shared by all modules."""


class GMTransformError(Exception):
    """Base class for every error raised by this package."""


class DomainError(GMTransformError, ValueError):
    """Arguments outside the region where an operation is defined."""


class PoleError(DomainError):
    """Gamma function evaluated at a nonpositive integer."""


class QuadratureError(GMTransformError, ArithmeticError):
    """Base class for numerical integration failures.

    ``result`` holds the last (unconverged) estimate when one exists.
    """

    def __init__(self, msg, result=None):
        super().__init__(msg)
        self.result = result


class BudgetExceeded(QuadratureError):
    pass


class NonFinite(QuadratureError):
    pass


class TailNotDecaying(QuadratureError):
    pass


class DivergentTail(QuadratureError):
    pass


class ContourError(DomainError):
    """Contour abscissa does not separate the two pole families."""


class MissingDerivative(GMTransformError, LookupError):
    pass


class TailBoundExceeded(GMTransformError):
    pass


class GrowthCertificateViolated(GMTransformError, ValueError):
    def __init__(self, msg, x=None):
        super().__init__(msg)
        self.x = x


class UnsupportedOrder(GMTransformError, ValueError):
    pass


class ExprSyntaxError(GMTransformError, SyntaxError):
    """Parse failure; ``offset`` is the byte offset, ``expected`` the token set."""

    def __init__(self, msg, offset, expected=()):
        super().__init__(f"{msg} at offset {offset}")
        self.offset = offset
        self.expected = tuple(expected)


class EvalDomainError(DomainError):
    """Expression evaluated outside its real domain (log/sqrt of negatives, division by zero)."""


class StepTooSmall(GMTransformError, ArithmeticError):
    """Finite-difference step dominated by quadrature noise."""


class ExistenceWarning(UserWarning):
    """Parameters fall outside the sufficient convergence region."""


class MethodDisagreementWarning(UserWarning):
    """Two inversion methods disagree beyond the diagnostic threshold."""
