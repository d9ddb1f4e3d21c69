"""Exception hierarchy shared by all numerical modules.

The split into categories mirrors the CLI exit codes: numerical failures
(quadrature, stepping, tracing), existence failures of the non-Hermitian
orthogonality, and Painleve pole hits are distinguishable by type.
"""


class QuarticPainleveError(Exception):
    """Base class for all package errors."""


class NumericalError(QuarticPainleveError):
    """Base for failures of a numerical method to meet its tolerance."""


class NonConvergence(NumericalError):
    """Two successive quadrature refinements disagree beyond quad_tol.

    Carries the achieved error estimate in ``estimate``.
    """

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class PoleOnBoundary(NumericalError):
    """Principal-value pole coincides with an integration endpoint."""


class StepUnderflow(NumericalError):
    """ODE step size fell below the precision floor without a blowup event."""


class StallError(NumericalError):
    """Curve tracer failed to decrease Re(phi) along a descent step."""


class SingularStart(NumericalError):
    """phi' vanished away from the branch point where the tracer started."""


class SeedAccuracyError(NumericalError):
    """Painleve seed error estimate exceeds the requested solve tolerance."""


class LatticeBlowup(NumericalError):
    """Freud lattice hit a division by a near-zero a_n."""

    def __init__(self, n, message=None):
        super().__init__(message or f"lattice division by near-zero a_{n}")
        self.n = n


class DomainError(QuarticPainleveError):
    """Argument outside the mathematical domain of an operation."""


class BranchCutError(DomainError):
    """Requested evaluation point or path crosses a branch cut."""


class DegenerateForm(QuarticPainleveError):
    """Non-Hermitian orthogonality degenerates: h_n below threshold at n."""

    def __init__(self, n, message=None):
        super().__init__(message or f"bilinear form degenerate at degree {n}")
        self.n = n


class PoleHit(QuarticPainleveError):
    """Requested x lies beyond a detected pole of the Painleve solution."""

    def __init__(self, x, pole, message=None):
        super().__init__(message or f"x={x} lies beyond detected pole near {pole}")
        self.x = x
        self.pole = pole


class InsufficientData(QuarticPainleveError):
    """Not enough data points for the requested fit or extrapolation."""
