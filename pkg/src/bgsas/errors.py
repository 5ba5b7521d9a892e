"""Exception types raised across the package.

Each subclasses ``ValueError`` so callers that only care about bad input can
catch one thing; the CLI maps them onto exit codes.
"""


class ParameterError(ValueError):
    """Model parameters fall outside their valid domain."""


class EmptyRequestError(ValueError):
    """A sample count of zero was requested."""


class UnsupportedSkewError(ValueError):
    """Skewed (beta != 0) stable laws are not supported."""


class ResolutionError(ValueError):
    """An evaluation grid is too coarse or too narrow for the requested law."""


class DegenerateSampleError(ValueError):
    """A sample has no spread (e.g. zero interquartile range or zero variance)."""


class SegmentationError(ValueError):
    """A trace cannot be split into segments of at least two samples."""


class IncompatibleGridsError(ValueError):
    """Two densities are not defined on the same bin grid."""


class EmptyHistogramError(ValueError):
    """No sample fell inside the histogram range."""


class SingularFitError(ValueError):
    """The least-squares design matrix is rank deficient."""


class ExtrapolationWarning(UserWarning):
    """A conversion surface was evaluated outside its fitted domain."""
