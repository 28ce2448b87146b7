"""Exception types shared across the package.

Each class names the invariant it reports. The CLI maps any of these to
exit code 2 and prints the class name alongside the diagnostic, so error
messages here should describe the offending value, not restate the name.
"""


class ValidationError(ValueError):
    """Base class for input and invariant violations."""


class NegativeEigenvalue(ValidationError):
    """A probability spectrum entry is below the negativity tolerance."""


class NotNormalized(ValidationError):
    """Spectrum entries do not sum to one within tolerance."""


class DimensionMismatch(ValidationError):
    """Operands describe spaces of incompatible dimension."""


class InvalidPermutation(ValidationError):
    """Index sequence is not a bijection on 0..N-1."""


class UnsupportedClass(ValidationError):
    """No closed-form landscape characteristics exist for this state class."""


class TooLarge(ValidationError):
    """Composite dimension exceeds the exact-enumeration limit."""


class NotUnitary(ValidationError):
    """Matrix fails the unitarity residual check."""


class NotHermitian(ValidationError):
    """Matrix fails the Hermitian symmetry check."""


class NonPositiveTemperature(ValidationError):
    """Thermal predicates require strictly positive temperatures."""
