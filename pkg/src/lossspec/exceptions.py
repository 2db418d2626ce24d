"""Exception hierarchy shared across the package.

Two error families matter to callers. `DataFormatError` covers malformed
input that a user can fix by editing files or arguments (CLI exit code 2).
`DegenerateSampleError` covers data that is syntactically fine but
numerically unusable, such as a zero-variance regressor or a vanishing
residual sum of squares (CLI exit code 3).
"""


class LossSpecError(Exception):
    """Base class for package-specific errors."""


class DataFormatError(LossSpecError):
    """Malformed input data or an unparseable argument grammar."""


class DegenerateSampleError(LossSpecError):
    """Numerically degenerate data: zero variance, zero SSR, rank deficiency."""


class QuadratureError(LossSpecError):
    """Adaptive quadrature failed to converge within its subdivision budget."""
