"""Exception hierarchy shared by the solvers and iteration engines."""


class HopfRicciError(Exception):
    """Base class for all library errors."""


class NoConvergence(HopfRicciError):
    """A Newton-type solve did not reach its tolerance."""


class RootSelectionAmbiguous(HopfRicciError):
    """No real root of the c-function cubic yields a positive metric."""


class PathFailure(HopfRicciError):
    """Parameter continuation could not reach the end of the path."""

    def __init__(self, message, last_lambda=None):
        super().__init__(message)
        self.last_lambda = last_lambda


class ScalingFailure(HopfRicciError):
    """The starting point of the homotopy cannot be scaled to satisfy the trace equation."""


class SingularDenominator(HopfRicciError):
    """Evaluation point lies on the pole x1 + x2 + x3 = 2n + 4 of the map f."""


class OutsideDomain(HopfRicciError):
    """Input lies outside the neighbourhood in which a local inverse is valid."""
