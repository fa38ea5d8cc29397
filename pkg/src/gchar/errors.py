"""Exception types shared across the engine."""


class GcharError(Exception):
    """Base class for engine errors."""


class InputError(GcharError):
    """Malformed user input (definition files, bad parameters)."""


class TruncationError(GcharError):
    """A computation could not be certified inside the requested window.

    Carries the first uncertified degree or stage so callers can retry
    with larger bounds.
    """

    def __init__(self, message, degree=None, stage=None):
        super().__init__(message)
        self.degree = degree
        self.stage = stage


class CertificationError(GcharError):
    """A post-hoc certificate failed (engine bug signal, not user error)."""


class UnsupportedError(GcharError):
    """The requested quantity has no computation path for this input."""
