"""Exception hierarchy.

Every error raised deliberately by the library derives from
:class:`PosetDefError`, so callers (and the CLI) can separate input errors
from genuine bugs.
"""


class PosetDefError(Exception):
    """Base class for all library errors."""


class CycleError(PosetDefError):
    """The supplied relation is not a strict partial order."""


class OutOfRange(PosetDefError):
    """An element index lies outside ``0..n-1``."""


class NotAntichain(PosetDefError):
    pass


class NotMaximalAntichain(PosetDefError):
    pass


class ExtensionFailed(PosetDefError):
    pass


class OrderViolation(PosetDefError):
    pass


class TooSmall(PosetDefError):
    pass


class NotUnique(PosetDefError):
    pass


class InvalidColoring(PosetDefError):
    """The coloring is not N-indiscernible; ``report`` carries the witness."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class InternalBoundViolation(PosetDefError):
    """A bound that holds for every valid input was exceeded."""


class NotMonochromatic(PosetDefError):
    pass


class BadMajority(PosetDefError):
    pass


class RepeatedIndex(PosetDefError):
    pass


class NotTotal(PosetDefError):
    pass


class SizeCapExceeded(PosetDefError):
    """An exponential search was refused because the input is too large."""


class CaseMismatch(PosetDefError):
    pass


class IndiscernibilityBroken(PosetDefError):
    """A construction hit a state that a Delta-indiscernible input cannot reach."""


class NoOrderSensitiveDelta(PosetDefError):
    pass


class SchemaError(PosetDefError):
    """Malformed JSON input."""


class NotChain(PosetDefError):
    pass
