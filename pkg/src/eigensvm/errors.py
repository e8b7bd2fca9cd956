"""Exception types shared across the package.

Everything derives from ValueError so callers that do not care about the
exact failure mode can still catch a single base class.
"""


class EigensvmError(ValueError):
    """Base class for all errors raised by this package."""


class NonFinite(EigensvmError):
    """Input contains NaN or Inf."""


class NotSymmetric(EigensvmError):
    """Matrix violates the symmetry tolerance."""


class DimensionMismatch(EigensvmError):
    """Operands have incompatible shapes."""


class IndefiniteDenominator(EigensvmError):
    """Denominator matrix is not positive definite after stabilization."""


class NegativeRadicand(EigensvmError):
    """Kernel-induced squared distance is negative beyond round-off."""


class EmptyClass(EigensvmError):
    """A class has no samples."""


class ZeroDenominator(EigensvmError):
    """Membership denominator r + gamma is zero."""


class DomainViolation(EigensvmError):
    """Membership / non-membership values outside their valid ranges."""


class ParseError(EigensvmError):
    """CSV cell failed to parse; message carries row/column context."""


class MixedLabelAlphabet(EigensvmError):
    """Label column is not one of the supported two-class alphabets."""


class EmptyFile(EigensvmError):
    """CSV file contains no data rows."""


class ClassTooSmall(EigensvmError):
    """A class has too few samples for the requested split/folding."""


class InvalidFraction(EigensvmError):
    """Fraction parameter outside its valid range."""


class LengthMismatch(EigensvmError):
    """Paired vectors differ in length."""


class IncompleteTable(EigensvmError):
    """Accuracy table is missing dataset/model cells."""


class DegenerateInput(EigensvmError):
    """Statistic undefined for this input (e.g. F_F denominator <= 0)."""


class EmptyInput(EigensvmError):
    """Operation requires at least one element."""
