"""Fredholm indices, essential spectra and Witten indices of strictly local band operators."""

from .core import (
    BandOperator,
    FiniteVector,
    TwoPhaseSequence,
    adjoint,
    apply,
    compose,
    compress_truncate,
    constant,
    from_blocks,
    identity,
    multiplication,
    shift,
    symbol_at,
    window_matrix,
)
from .errors import (
    ConstraintError,
    DimensionError,
    IndeterminateWindingError,
    InvariantsError,
    NotFredholmError,
    TruncationError,
    VerificationError,
    WindingDiscrepancyError,
    ZeroPolynomialError,
)
from .index import InvariantReport, fredholm_index
from .spectrum import CircularBandSet, SpectrumCloud, essential_spectrum, in_essential_spectrum
from .symbol import LaurentMatrixSymbol, LaurentPoly, WindingResult, det, winding

__version__ = "0.1.0"
