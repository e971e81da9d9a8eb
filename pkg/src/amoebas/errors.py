"""Exception hierarchy and warnings shared across the package.

Exit-code mapping used by the CLI: input problems map to 1, numerical
failures to 2, verification failures to 3.
"""


class AmoebaError(Exception):
    """Base class for all package errors."""


class InputError(AmoebaError):
    """Invalid user input (CLI exit code 1)."""


class ParseError(InputError):
    """Polynomial text does not conform to the grammar."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


class EmptyPolynomialError(InputError):
    """All terms cancelled; a polynomial needs at least one term."""


class DomainError(InputError):
    """Evaluation at a point outside the operation's domain."""


class NotLatticePointError(InputError):
    """Requested point is not a lattice point of the polygon."""


class NumericalError(AmoebaError):
    """Numerical failure (CLI exit code 2)."""


class DegenerateFiberError(NumericalError):
    """All fiber coefficients vanish; the base point sits on a coefficient
    zero locus."""


class RootConvergenceError(NumericalError):
    """Root iteration failed to reach the residual tolerance."""

    def __init__(self, message: str, best_roots=None, best_residual=None):
        super().__init__(message)
        self.best_roots = best_roots
        self.best_residual = best_residual


class RasterInconsistencyError(NumericalError):
    """A connected complement region carries more than one order index
    (raster too coarse)."""


class OrdInjectivityError(NumericalError):
    """Two disjoint complement regions claim the same order index."""


class InsufficientSamplesError(NumericalError):
    """Not enough interior cells to draw the requested samples."""


class LiftFailureError(NumericalError):
    """No fiber solution lands close enough to the requested log-level."""


class NoAnchorCandidateError(NumericalError):
    """No axis-line root lies on the required argument ray."""


class ClosureDivergenceError(NumericalError):
    """A lifted boundary end does not approach its predicted anchor."""


class MembershipUncertainError(NumericalError):
    """A probe point classified Uncertain where a definite answer is
    required."""


class BoundaryTraceError(NumericalError):
    """A ray never exits the component inside the search range."""


class VerificationError(AmoebaError):
    """A verified identity failed (CLI exit code 3)."""


class TruncationWarning(UserWarning):
    """The amoeba touches the raster window edge; area is reported up to
    the attached error bar."""


class MultiValuedLiftWarning(UserWarning):
    """Lifted boundary arguments spread beyond the single-point tolerance
    (input likely not Harnack)."""


class AmbiguousAnchorWarning(UserWarning):
    """More than one axis-line root matched the argument ray; nearest by
    extrapolation was chosen."""
