"""Exception and warning types shared across the toolkit."""


class TenspcaError(Exception):
    """Base class for all toolkit errors."""


class ShapeMismatch(TenspcaError):
    """Operands have incompatible dimensions."""


class NotPositiveDefinite(TenspcaError):
    """The penalized quadratic is not positive definite (rho too small)."""


class MaxIterExceeded(TenspcaError):
    """The solver hit its iteration cap without meeting the tolerance."""


class DegenerateComponent(TenspcaError):
    """The sparsity weight annihilated the component (lambda too large)."""


class SolveFailure(TenspcaError):
    """A linear system factorization failed."""


class ModelFormatError(TenspcaError):
    """A model file is truncated or carries an unknown magic/version."""


class ParseError(TenspcaError):
    """A text input could not be parsed; message carries the line number."""


class NonContiguousLabels(TenspcaError):
    """Dataset labels do not form contiguous non-decreasing class blocks."""


class BadPixelCount(TenspcaError):
    """A sample row does not match the declared image dimensions."""


class PgmFormatError(TenspcaError):
    """A PGM file is not binary 8-bit grayscale or is malformed."""


class InconsistentDimensions(TenspcaError):
    """Images in one dataset have differing dimensions."""


class MissingLabel(TenspcaError):
    """An image file and the labels file do not pair up."""


class RankWarning(UserWarning):
    """Requested more components than the data has non-trivial directions."""
