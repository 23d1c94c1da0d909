"""Exception types raised across the package."""


class QWalkError(Exception):
    """Base class for all package errors."""

    code = "QWalkError"


class NonConvergence(QWalkError):
    code = "NonConvergence"


class DegenerateEigenvector(QWalkError):
    code = "DegenerateEigenvector"


class NotUnitary(QWalkError):
    code = "NotUnitary"


class InvalidC2Params(QWalkError):
    """The second localizing family is undefined for these angles."""

    code = "InvalidC2Params"


class InconsistentCoin(QWalkError):
    code = "InconsistentCoin"


class TrackingFailure(QWalkError):
    code = "TrackingFailure"


class DomainError(QWalkError):
    code = "DomainError"


class BandEdge(QWalkError):
    code = "BandEdge"


class PoleOnContour(QWalkError):
    code = "PoleOnContour"


class ClosedFormMismatch(QWalkError):
    """Closed-form and quadrature values disagree.

    Both values are kept on the instance so callers can inspect them.
    """

    code = "ClosedFormMismatch"

    def __init__(self, message, closed_form=None, quadrature=None):
        super().__init__(message)
        self.closed_form = closed_form
        self.quadrature = quadrature


class LatticeOverflow(QWalkError):
    code = "LatticeOverflow"


class InsufficientSignal(QWalkError):
    code = "InsufficientSignal"
