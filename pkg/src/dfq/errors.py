"""Exception hierarchy for the dfq package."""


class DfqError(Exception):
    """Base class for all dfq errors."""


class DegenerateData(DfqError):
    """Raised when a sample is too small or constant to fit a distribution."""


class ZeroMassInterval(DfqError):
    """Raised when an interval carries no usable probability mass."""


class InvalidBitWidth(DfqError):
    """Raised when a bit width is outside the supported range."""


class NoConvergence(DfqError):
    """Raised when the fixed-point iteration exhausts its iteration budget.

    The partially optimized spec and its trace are attached so callers can
    inspect or resume.
    """

    def __init__(self, message, spec=None, trace=None):
        super().__init__(message)
        self.spec = spec
        self.trace = trace


class ShapeMismatch(DfqError):
    """Raised when tensor shapes disagree."""


class NonFiniteValue(DfqError):
    """Raised when tensor data contains NaN or infinities."""


class CodeOutOfRange(DfqError):
    """Raised when a quantized code does not fit the declared bit width."""


class ManifestError(DfqError):
    """Raised when a manifest is malformed or its files fail validation."""


class FileFormatError(DfqError):
    """Raised when a QTNS/QDFQ file is malformed."""
