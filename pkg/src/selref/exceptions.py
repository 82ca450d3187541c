"""Exception hierarchy for the selref toolkit.

Every error raised on a documented failure path derives from
:class:`SelrefError`, so callers (and the CLI) can catch one base class.
"""


class SelrefError(Exception):
    """Base class for all selref errors."""


class ShapeMismatchError(SelrefError):
    """Array dimensions do not line up."""


class EmptyStackError(SelrefError):
    """A sample stack with zero samples cannot be aggregated."""


class WrongClassCountError(SelrefError):
    """Operation requires a specific number of classes."""


class InvalidProbabilityRowError(SelrefError):
    """A probability row violates the simplex constraint beyond tolerance."""

    def __init__(self, message, line=None):
        super().__init__(message)
        self.line = line


class EmptyMatrixError(SelrefError):
    """Confusion matrix has zero total count."""


class DegenerateAgreementError(SelrefError):
    """Kappa denominator is zero while the numerator is not.

    Cannot happen for a valid count matrix; signals corrupted input.
    """


class SingleClassError(SelrefError):
    """ROC-AUC needs at least one positive and one negative label."""


class MisalignedError(SelrefError):
    """Uncertainty vector does not align with the prediction set."""


class TooFewLevelsError(SelrefError):
    """Improvement markers need at least two referral levels."""


class EmptyInputError(SelrefError):
    """Operation requires a nonempty input."""


class InvalidBError(SelrefError):
    """Bootstrap resample count must be a positive integer."""


class NonPositiveScaleError(SelrefError):
    """Gaussian scale parameters must be strictly positive."""


class InvalidAlphaError(SelrefError):
    """Renyi divergence order must lie in (0, 1)."""


class NonFiniteError(SelrefError):
    """An objective or gradient produced a non-finite value."""


class DivergedError(SelrefError):
    """Training loss became non-finite."""


class InvalidSpecError(SelrefError):
    """Synthetic dataset request is invalid."""


class ParseError(SelrefError):
    """A data file could not be parsed."""

    def __init__(self, message, line=None):
        super().__init__(message)
        self.line = line


class DuplicateIdError(ParseError):
    """The same example id appears twice in an aggregated prediction file."""


class MissingCellError(ParseError):
    """A (example, sample) pair is absent from a stack file."""


class InconsistentLabelError(ParseError):
    """An example carries different labels in different stack rows."""
