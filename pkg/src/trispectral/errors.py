"""Exception types shared across the package.

Every error raised on a violated contract derives from TrispectralError so
callers (and the CLI) can map failures to exit codes without matching on
message strings.
"""


class TrispectralError(Exception):
    """Base class for all package-specific failures."""


class ValidationError(TrispectralError):
    """Input data fails a structural or mathematical consistency check."""


class MismatchedLengthError(ValidationError):
    """Sequence lengths are inconsistent with the gap structure they imply."""


class AmbiguousGapError(ValidationError):
    """A spectral point sits within tolerance of a gap endpoint."""


class NegativeSquareTailError(ValidationError):
    """Eigenvalue squares are negative beyond the first few indices."""


class NearCoincidentSpectraError(ValidationError):
    """Two half-interval spectra share a point, so a node value blows up."""


class ShiftRequiredError(ValidationError):
    """A node square sits at zero; apply a spectral shift before proceeding."""


class NoRegularIntervalsError(ValidationError):
    """A substituted square does not sit in a gap that can host its pair."""


class ReconstructionError(TrispectralError):
    """A numerical stage of the reconstruction failed."""


class ShootOverflowError(ReconstructionError):
    """Shooting integration overflowed (spectral parameter far below range)."""

    def __init__(self, z, message=None):
        self.z = z
        super().__init__(message or f"shooting solution overflowed at z={z!r}")


class MissedEigenvalueError(ReconstructionError):
    """Root search could not isolate one eigenvalue per asymptotic slot."""


class PoleAtBaselineZeroError(ReconstructionError):
    """Evaluation point hits an uncancelled baseline zero beyond truncation."""


class EvaluationAtZeroError(ReconstructionError):
    """Logarithmic derivative requested at a zero of the product."""


class IndexOutOfTruncationError(ReconstructionError):
    """Zero index exceeds the truncation order of the product."""


class ZeroNotFoundError(ReconstructionError):
    """Expected zero of an interpolated function is absent from its bracket."""


class ExtraZeroError(ReconstructionError):
    """More zeros than expected appeared in a search bracket."""


class NonPositiveNormingError(ReconstructionError):
    """A norming constant came out non-positive; spectra are inconsistent."""


class IllConditionedGLError(ReconstructionError):
    """Discretized integral-equation system is numerically singular."""

    def __init__(self, x, cond, message=None):
        self.x = x
        self.cond = cond
        super().__init__(
            message or f"integral-equation matrix ill-conditioned at x={x:.6g} (cond={cond:.3g})"
        )


class InputOutputError(TrispectralError):
    """File or format problem while reading or writing artifacts."""
