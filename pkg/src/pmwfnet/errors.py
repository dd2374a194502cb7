"""Exception hierarchy shared by all pmwfnet modules.

Every error raised by the package derives from PmwfError so callers (and the
CLI) can catch one base class and still report a machine-parsable class name.
"""


class PmwfError(Exception):
    """Base class for all pmwfnet errors."""


class SingularMatrix(PmwfError):
    """Diagonally loaded matrix is still numerically singular."""


class DegenerateDenominator(PmwfError):
    """Filter denominator collapsed below the usable threshold."""


class ChannelMismatch(PmwfError):
    """Sample block carries a different channel count than configured."""


class BinCountMismatch(PmwfError):
    """Spectrum has the wrong number of frequency bins."""


class BadMagic(PmwfError):
    """Weight container does not start with the NPW1 magic."""


class TruncatedContainer(PmwfError):
    """Weight container ends before the declared payload."""


class MissingTensor(PmwfError):
    """A required tensor name is absent from the container."""


class ShapeMismatch(PmwfError):
    """A tensor is present but its shape contradicts the hyperparameters."""


class UnsupportedFormat(PmwfError):
    """File format or encoding not handled by this build."""


class CorruptHeader(PmwfError):
    """Structurally invalid file header."""


class IoFailure(PmwfError):
    """Underlying OS read/write failed."""


class LengthMismatch(PmwfError):
    """Two signals that must be the same length are not."""


class ZeroReference(PmwfError):
    """Reference signal has no energy; the metric is undefined."""
