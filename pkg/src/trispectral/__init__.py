"""Inverse Sturm-Liouville reconstruction from three spectra.

A potential on [0, a] is determined by its full-interval Dirichlet spectrum
together with the Dirichlet spectra of the two halves, even when finitely
many half-interval eigenvalues are replaced by Dirichlet-Neumann ones.  This
package provides the forward solver, the spectral bookkeeping, the
completion of the depleted half spectra, and the half-interval inversions
that turn completed spectra back into a potential.
"""

from .basis import (
    cosine_like,
    cosine_like_dz,
    cosine_like_dz2,
    sine_like,
    sine_like_dz,
    sine_like_dz2,
)
from .direct_solver import PotentialGrid, ShootingResult, find_spectrum, forward_all, shoot
from .entire_products import BaselineKind, EntireProduct, assemble_zero_table
from .errors import (
    AmbiguousGapError,
    EvaluationAtZeroError,
    ExtraZeroError,
    IllConditionedGLError,
    IndexOutOfTruncationError,
    InputOutputError,
    MismatchedLengthError,
    MissedEigenvalueError,
    NearCoincidentSpectraError,
    NegativeSquareTailError,
    NonPositiveNormingError,
    NoRegularIntervalsError,
    PoleAtBaselineZeroError,
    ReconstructionError,
    ShiftRequiredError,
    ShootOverflowError,
    TrispectralError,
    ValidationError,
    ZeroNotFoundError,
)
from .functional_eq import (
    CharacteristicEvaluator,
    CompletedSpectra,
    FunctionalEquationReport,
    InterpolationProblem,
    build_products,
    complete_spectra,
    complete_three_spectra,
    node_values,
    reconstruct_X,
    tau_eval,
)
from .gl_inverse import (
    GLKernel,
    NormingConstants,
    build_F,
    extend_norming_tail,
    norming_constants,
    potential_from_kernel,
    reconstruct_potential_two_spectra,
    solve_gl,
)
from .pipeline import (
    PipelineConfig,
    reconstruct_from_input,
    run_forward,
    run_reconstruct,
    run_roundtrip,
    run_validate,
)
from .spectral_data import (
    Branch,
    GapInfo,
    InterlacingReport,
    RegularIntervalMap,
    SpectraBundle,
    SpectralSequence,
    ThreeSpectraInput,
    classify_gaps,
    classify_regular_intervals,
    dump_json,
    estimate_mean_potential,
    extrapolate_mean,
    load_json,
    slot_roots,
    validate_interlacing,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
