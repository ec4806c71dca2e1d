"""Exception types shared across the package."""

__all__ = [
    "DimensionError",
    "PreconditionError",
    "NoPositiveVector",
    "EigensolveError",
    "NotNegativeDefinite",
    "InvalidWitness",
    "NotTriangular",
    "VerificationError",
    "InversionError",
    "StepCollapse",
]


class DimensionError(ValueError):
    """Input has the wrong shape (non-square, mismatched sizes, ...)."""


class PreconditionError(ValueError):
    """A documented precondition of the operation does not hold."""


class NoPositiveVector(PreconditionError):
    """No strictly positive vector v with Av << 0 exists (matrix is not
    Metzler-Hurwitz, or is singular)."""


class EigensolveError(RuntimeError):
    """The underlying eigensolver failed to converge.  Distinct from a
    negative answer: predicates never report False because of this."""


class NotNegativeDefinite(ArithmeticError):
    """Raised when a candidate certificate fails the definiteness test.

    Carries the offending largest eigenvalue in ``lambda_max``.
    """

    def __init__(self, lambda_max, message=None):
        self.lambda_max = float(lambda_max)
        if message is None:
            message = f"matrix is not negative definite (lambda_max = {self.lambda_max:.6g})"
        super().__init__(message)


class InvalidWitness(ValueError):
    """Witness blocks violate the structural invariants (PSD, nonzero,
    diagonal ordering).  Distinct from a witness that merely fails the
    diagonal check."""


class NotTriangular(PreconditionError):
    """The pair is not jointly lower or jointly upper triangular."""


class VerificationError(RuntimeError):
    """An internal cross-check failed.  This signals a bug, not bad input."""


class InversionError(ValueError):
    """A componentwise function inversion failed (target outside range)."""


class StepCollapse(RuntimeError):
    """Integrator step size collapsed while trying to keep the state positive.

    Carries the failure time ``t`` and the last accepted ``state``.
    """

    def __init__(self, t, state):
        self.t = float(t)
        self.state = state
        super().__init__(f"step size collapsed at t = {self.t:.6g}; state = {state}")
