"""Error types raised across the lipwidth modules.

Every error derives from ``ValueError`` so callers that only know about the
built-in contract violations still catch them.
"""


class LipwidthError(ValueError):
    """Base class for all lipwidth errors."""


class InputError(LipwidthError):
    """Malformed input: dimension mismatch, wrong length, empty grid."""


class DomainError(LipwidthError):
    """A hypothesis of a bound or implication does not hold."""


class NumericError(LipwidthError):
    """A non-finite value appeared during evaluation."""

    def __init__(self, message: str, layer: int | None = None):
        super().__init__(message)
        self.layer = layer


class CapacityError(LipwidthError):
    """The exact solver was asked to handle an input above its size cap."""


class InvalidCertificateError(LipwidthError):
    """A claimed Lipschitz constant or cover failed verification."""


class UnsupportedError(LipwidthError):
    """A rate combination outside every case the implications cover."""
