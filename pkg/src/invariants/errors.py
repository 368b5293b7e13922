"""Exception types shared across the package."""


class InvariantsError(Exception):
    """Base class for errors raised by this package."""


class DimensionError(InvariantsError, ValueError):
    """Operands have incompatible block sizes."""


class TruncationError(InvariantsError, ValueError):
    """Truncation length too small for the operator."""


class IndeterminateWindingError(InvariantsError, ArithmeticError):
    """Phase unwrapping did not converge; the curve passes (nearly) through 0."""


class WindingDiscrepancyError(InvariantsError, ArithmeticError):
    """The two winding-number algorithms disagree on a nowhere-vanishing curve."""


class ZeroPolynomialError(InvariantsError, ValueError):
    """Operation undefined for the identically zero Laurent polynomial."""


class ConstraintError(InvariantsError, ValueError):
    """Walk parameters violate p^2 + |q|^2 = 1 or a^2 + |b|^2 = 1, or a phase is inconsistent."""


class NotFredholmError(InvariantsError, ArithmeticError):
    """The operator (or chiral pair) is not Fredholm, so the index is undefined."""


class VerificationError(InvariantsError, AssertionError):
    """Two independent computations of the same quantity disagree."""


class SpecError(InvariantsError, ValueError):
    """An operator or walk specification file is malformed."""
