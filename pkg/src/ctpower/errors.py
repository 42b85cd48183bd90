"""Exception types shared across the package.

All of these derive from ValueError so callers that only care about
"bad input" can catch one base class.
"""


class NormalizationError(ValueError):
    """A state vector, density matrix, or parameter pair is not normalized."""


class DimensionError(ValueError):
    """Operands have incompatible or unsupported dimensions."""


class RangeError(ValueError):
    """A real parameter lies outside its documented domain."""


class DegenerateBasisError(ValueError):
    """A measurement basis vector has zero norm before normalization."""


class CorrectionMismatchError(ValueError):
    """Post-correction receiver states disagree across sender outcomes.

    Raised when the disagreement exceeds 1e-10, which separates a wrong
    correction table from accumulated floating-point noise.
    """


class MatchedFamiliesError(ValueError):
    """A mismatch computation was asked to pair a channel with its own family."""


class ConvergenceError(ValueError):
    """Adaptive quadrature failed to reach the requested tolerance."""
